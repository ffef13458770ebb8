import pytest


@pytest.fixture
def fixture_dir(tmp_path):
    """Hand-written miniature CSVs, one per documented schema."""

    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return path

    write("r_aggregate.csv",
          "D_over_J,L,r_mean,r_stderr,samples\n"
          "0.01,6,0.41,0.01,4\n"
          "2,6,0.53,0.008,4\n"
          "100,6,0.39,0.012,4\n")
    write("r_aggregate_clean.csv",
          "g_cl_over_J,L,r_mean,r_stderr,samples\n"
          "0.01,6,0.25,0,1\n"
          "2,6,0.52,0,1\n")
    write("ee_aggregate.csv",
          "D_over_J,L,S_mean,S_over_SP,Delta_S,S_P,S_P_stderr\n"
          "0.01,6,2.1,0.93,0.02,2.26,0.003\n"
          "2,6,2.15,0.95,0.015,2.26,0.003\n"
          "100,6,0.4,0.18,0.2,2.26,0.003\n")
    write("ee_traj_D100.csv",
          "realization,t,S\n"
          "0,0.1,0.01\n0,10,0.5\n0,1000,0.9\n"
          "1,0.1,0.02\n1,10,0.6\n1,1000,1.0\n"
          "mean,0.1,0.015\nmean,10,0.55\nmean,1000,0.95\n")
    write("ee_traj_nomean.csv",
          "realization,t,S\n"
          "0,0.1,0.01\n0,10,0.5\n"
          "1,0.1,0.03\n1,10,0.7\n")
    write("occupations_D0p01.csv",
          "realization,t,site,n_c,n_a\n"
          + "".join(f"0,{t},{s},{0.5 + 0.1 * s},{0.2}\n"
                    for t in (0.0, 1.0, 2.0) for s in (1, 2, 3, 4))
          + "".join(f"mean,{t},{s},{0.4 + 0.1 * s},{0.25}\n"
                    for t in (0.0, 1.0, 2.0) for s in (1, 2, 3, 4)))
    write("eth_diag_D2.csv",
          "realization,eps,O_label,value\n"
          + "".join(f"0,{0.1 + 0.08 * k},N_3,{1.0 + 0.05 * (-1) ** k}\n"
                    for k in range(10)))
    write("eth_binned_D2.csv",
          "O_label,omega_bin_center,L_omega,mean_abs2,mean_abs,gamma,count\n"
          "N_3,0.001,0.006,0.0004,0.016,1.56,40\n"
          "N_3,0.003,0.018,0.0003,0.014,1.53,35\n"
          "N_3,0.005,0.03,0.0002,0.011,1.65,21\n")
    write("broken_r_aggregate.csv",
          "D_over_J,L,r_stderr,samples\n0.01,6,0.01,4\n")
    write("empty.csv", "realization,t,S\n")
    write("headerless.csv", "")
    return tmp_path
