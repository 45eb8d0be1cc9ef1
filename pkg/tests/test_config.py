import pytest

from nlspread.config import KernelSpec, load, loads
from nlspread.errors import ConfigError
from nlspread.kernels import Normal, Uniform

BASE = """\
model.alpha = 0.2
model.beta = 0.2
model.g = saturating(slope=0.6)
model.h = saturating(slope=0.6)
kernel.u = normal(mean=0.5, var=1)
kernel.v = uniform(lower=-1, upper=1)
"""


def test_round_trip_is_canonical():
    cfg = loads(BASE + "time.horizon = 50\n")
    again = loads(cfg.dumps())
    assert again == cfg
    assert again.dumps() == cfg.dumps()
    assert again.digest() == cfg.digest()


def test_digest_ignores_comments_and_order():
    a = loads(BASE)
    b = loads("# comment\n" + "\n".join(reversed(BASE.splitlines())) + "\n")
    assert a.digest() == b.digest()


def test_digest_changes_with_values():
    assert loads(BASE).digest() != loads(BASE, ["time.dt=0.04"]).digest()


def test_builds_kernels_and_params():
    cfg = loads(BASE)
    k1, k2 = cfg.kernels()
    assert isinstance(k1, Normal) and k1.mean_ == 0.5
    assert isinstance(k2, Uniform)
    assert cfg.params().gh == pytest.approx(0.36)


def test_gh_product_alternative():
    cfg = loads("model.alpha = 0.2\nmodel.beta = 0.1\nmodel.gh_product = 0.022\n"
                "kernel.u = normal(mean=0.5, var=1)\nkernel.v = normal(var=2)\n")
    assert cfg.params().gh == pytest.approx(0.022)


@pytest.mark.parametrize("extra, line, fragment", [
    ("model.alpha = 0.3\n", 7, "duplicate"),
    ("model.gamma = 1\n", 7, "unknown key"),
    ("time.dt = -1\n", 7, "time.dt"),
    ("nonsense\n", 7, "key = value"),
])
def test_errors_carry_line_numbers(extra, line, fragment):
    with pytest.raises(ConfigError) as exc:
        loads(BASE + extra)
    assert exc.value.line == line
    assert fragment in str(exc.value)


def test_missing_required_key():
    with pytest.raises(ConfigError, match="kernel.v"):
        loads("\n".join(BASE.splitlines()[:-1]))


def test_bad_kernel_argument_reports_its_line():
    text = BASE.replace("uniform(lower=-1, upper=1)", "uniform(lower=1, upper=2)")
    with pytest.raises(ConfigError) as exc:
        loads(text)
    assert exc.value.line == 6


def test_hypothesis_violation_is_config_error():
    # g'(0)h'(0) = 0.01 is below alpha*beta = 0.04
    with pytest.raises(ConfigError):
        loads(BASE.replace("slope=0.6", "slope=0.1"))


def test_exponential_needs_one_rate():
    with pytest.raises(ConfigError, match="exactly one"):
        loads(BASE + "initial.kind = exponential\n")
    cfg = loads(BASE + "initial.kind = exponential\ninitial.rate_fraction = 0.5\n")
    assert cfg.rate_fraction == 0.5


def test_overrides_apply_last():
    cfg = loads(BASE, ["model.alpha=0.25", "kernel.u=normal(mean=0, var=2)"])
    assert cfg.alpha == 0.25
    assert cfg.kernel_u == KernelSpec.parse("normal(mean=0, var=2)")


def test_with_value_kernel_sigma():
    cfg = loads(BASE).with_value("kernel.v.sigma", 0.75)
    assert str(cfg.kernel_v) == "uniform(lower=-0.75, upper=0.75)"
    assert cfg.kernel_v.family == "uniform"
    with pytest.raises(ConfigError):
        loads(BASE).with_value("model.nothing", 1.0)


def test_table_kernel_relative_to_file(tmp_path):
    (tmp_path / "k.csv").write_text("x,density\n-0.2,1\n-0.1,2\n0,3\n0.1,2\n0.2,1\n")
    path = tmp_path / "s.cfg"
    path.write_text(BASE.replace("uniform(lower=-1, upper=1)", "table(k.csv)"))
    cfg = load(path)
    assert cfg.kernels()[1].is_symmetric


def test_unreadable_file():
    with pytest.raises(ConfigError):
        load("/nonexistent/scenario.cfg")
