from pathlib import Path

import pytest

SAMPLE_CSV = """\
# experiment=quench
# L=2
# sector=++
# c=++
# perturbation=transverse
# lambda=0.1
# V=100
# epsilon=0
# init=random_product
# seed=1
# evolver=dense
# t_max=100
# n_times=4
# spacing=log
# cut=1
# out_dir=.
# lambda_list=
# v_list=
# targets=
# entropy_base=e
time,entropy,norm_error
0.1,1e-06,0
1,2e-06,0
10,2.5e-06,0
100,2.5e-06,0
"""


def make_sample(dir_path: Path, name="quench_a.csv", lam="0.1", V="100",
                entropy_scale=1.0) -> Path:
    text = SAMPLE_CSV.replace("# lambda=0.1", f"# lambda={lam}")
    text = text.replace("# V=100", f"# V={V}")
    if entropy_scale != 1.0:
        lines = text.splitlines()
        head = [l for l in lines if l.startswith("#") or l.startswith("time")]
        rows = []
        for l in lines:
            if l.startswith("#") or l.startswith("time"):
                continue
            t, s, n = l.split(",")
            rows.append(f"{t},{float(s) * entropy_scale:.17g},{n}")
        text = "\n".join(head + rows) + "\n"
    path = dir_path / name
    path.write_text(text)
    return path


@pytest.fixture
def sample_dir(tmp_path) -> Path:
    make_sample(tmp_path)
    return tmp_path
