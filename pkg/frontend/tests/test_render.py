import hashlib

import numpy as np
import pytest

from zenoplots.csvdata import SchemaError
from zenoplots.figspec import FigureSpec
from zenoplots.render import render, rescale_times, rescale_values
from zenoplots import cli

from conftest import make_sample


def file_hash(path):
    return hashlib.md5(path.read_bytes()).hexdigest()


def test_render_ee_curves(sample_dir):
    make_sample(sample_dir, name="quench_b.csv", lam="0.2", entropy_scale=0.25)
    spec = FigureSpec(kind="ee_curves", input="quench_*.csv", out="fig.png",
                      base_dir=sample_dir)
    result = render(spec)
    assert result.out_path.exists()
    assert result.out_path.stat().st_size > 0
    assert len(result.main) == 2


def test_render_is_read_only(sample_dir):
    src = sample_dir / "quench_a.csv"
    before = file_hash(src)
    render(FigureSpec(kind="ee_curves", input="quench_*.csv", out="fig.png",
                      base_dir=sample_dir))
    assert file_hash(src) == before


def test_render_empty_glob_errors(sample_dir):
    spec = FigureSpec(kind="ee_curves", input="none_*.csv", out="fig.png",
                      base_dir=sample_dir)
    with pytest.raises(SchemaError, match="no input files"):
        render(spec)
    assert not (sample_dir / "fig.png").exists()


def test_inset_is_exact_rescaling(sample_dir):
    make_sample(sample_dir, name="quench_b.csv", lam="0.2", entropy_scale=4.0)
    spec = FigureSpec(kind="rescaled_inset", input="quench_*.csv",
                      out="fig.png", value_exponent=2, time_exponent=3,
                      base_dir=sample_dir)
    result = render(spec)
    assert len(result.inset) == len(result.main) == 2
    for curve, (t, s), (ti, si) in zip(result.curves, result.main, result.inset):
        k = np.random.default_rng(0).integers(len(t))
        assert si[k] == s[k] * (curve.V / curve.lam) ** 2
        assert ti[k] == t[k] * curve.lam / curve.V**3
    # and the helper functions are the single source of that arithmetic
    np.testing.assert_array_equal(
        result.inset[0][1], rescale_values(result.main[0][1], 0.1, 100.0, 2)
    )
    np.testing.assert_array_equal(
        result.inset[0][0], rescale_times(result.main[0][0], 0.1, 100.0, 3)
    )


def test_overlay_requires_shared_sector(sample_dir):
    bad = make_sample(sample_dir, name="quench_b.csv")
    text = bad.read_text().replace("# sector=++", "# sector=+-")
    bad.write_text(text)
    spec = FigureSpec(kind="rescaled_inset", input="quench_*.csv",
                      out="fig.png", base_dir=sample_dir)
    with pytest.raises(SchemaError, match="disagree on 'sector'"):
        render(spec)


def test_render_spectrum(tmp_path):
    path = tmp_path / "spectrum_x.csv"
    path.write_text(
        "# L=1\n# sector=+\n# perturbation=none\n# lambda=0\n# V=5\n"
        "energy,dominant_sector,weight\n"
        "-5,+,1\n-5,+,1\n5,-,1\n5,-,1\n"
    )
    spec = FigureSpec(kind="spectrum", input="spectrum_*.csv", out="spec.png",
                      xscale="linear", base_dir=tmp_path)
    result = render(spec)
    assert result.out_path.exists()


def test_render_coefficients(tmp_path):
    path = tmp_path / "ptcoeff_x.csv"
    path.write_text(
        "# L=2\n# sector=+-\n# perturbation=transverse\n# lambda=0.1\n# V=100\n"
        "time,coeff_abs_0001,coeff_abs_0111\n"
        "0.1,0.25,0.001\n1,0.25,0.002\n10,0.25,0.002\n"
    )
    spec = FigureSpec(kind="coefficients", input="ptcoeff_*.csv",
                      out="pt.png", yscale="log", base_dir=tmp_path)
    result = render(spec)
    assert len(result.main) == 2


def test_render_collapse(tmp_path):
    for tag, lam in (("a", "0.05"), ("b", "0.1")):
        (tmp_path / f"collapse_curve_{tag}.csv").write_text(
            f"# L=2\n# sector=+-\n# perturbation=transverse\n# lambda={lam}\n# V=100\n"
            "rescaled_time,rescaled_entropy\n"
            "1e-06,1.0\n1e-05,1.1\n1e-04,2.0\n"
        )
    spec = FigureSpec(kind="collapse", input="collapse_curve_*.csv",
                      out="col.png", yscale="log", base_dir=tmp_path)
    result = render(spec)
    assert len(result.main) == 2


def test_cli_roundtrip(sample_dir, capsys):
    spec = sample_dir / "fig.spec"
    spec.write_text("kind = ee_curves\ninput = quench_*.csv\nout = cli.png\n")
    assert cli.main([str(spec)]) == 0
    assert (sample_dir / "cli.png").exists()
    assert "cli.png" in capsys.readouterr().out


def test_cli_error_paths(sample_dir, capsys):
    bad = sample_dir / "bad.spec"
    bad.write_text("kind = nope\ninput = quench_*.csv\n")
    assert cli.main([str(bad)]) == 2
    empty = sample_dir / "empty.spec"
    empty.write_text("kind = ee_curves\ninput = zzz_*.csv\n")
    assert cli.main([str(empty)]) == 2
