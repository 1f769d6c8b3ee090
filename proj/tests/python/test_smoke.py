"""Black-box smoke tests: python bindings cross-checked against numpy, plus the
CLI artifact contract (exit codes, JSON schemas, file layout).

Run through ctest (which sets PYTHONPATH / XPINN_LAB_BIN / XPINN_LAB_SRC) or
directly with a finished build in ./build.
"""

import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

HERE = Path(__file__).resolve().parent
SRC = Path(os.environ.get("XPINN_LAB_SRC", HERE.parents[1]))
BIN = Path(os.environ.get("XPINN_LAB_BIN", SRC / "build" / "xpinn-lab"))
SCHEMAS = SRC / "schemas"

if "xpinnlab" not in sys.modules:
    sys.path.insert(0, str(SRC / "build"))
import xpinnlab as xl  # noqa: E402

import jsonschema  # noqa: E402
from referencing import Registry, Resource  # noqa: E402


def schema_validator(name):
    resources = []
    for path in SCHEMAS.glob("*.schema.json"):
        contents = json.loads(path.read_text())
        resources.append((contents["$id"], Resource.from_contents(contents)))
    registry = Registry().with_resources(resources)
    schema = json.loads((SCHEMAS / name).read_text())
    return jsonschema.Draft7Validator(schema, registry=registry)


def run_cli(*args, env_extra=None, cwd=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([str(BIN), *args], capture_output=True, text=True,
                          env=env, cwd=cwd, timeout=300)


# ---------------------------------------------------------------- bindings

def np_forward(ck, x):
    """Recompute the network from its checkpoint dict."""
    act = np.tanh if ck["activation"] == "tanh" else np.sin
    dims = ck["dims"]
    h = np.asarray(x, dtype=float)
    for l, layer in enumerate(ck["layers"]):
        w = np.asarray(layer["w"]).reshape(dims[l + 1], dims[l])
        b = np.asarray(layer["b"])
        h = w @ h + b
        if l + 1 < len(ck["layers"]):
            h = act(h)
    return float(h[0])


@pytest.mark.parametrize("activation", ["tanh", "sine"])
def test_checkpoint_roundtrip_matches_numpy(tmp_path, activation):
    net = xl.make_mlp([2, 7, 5, 1], activation, seed=11)
    assert net.dims == [2, 7, 5, 1]
    assert net.depth == 3
    assert net.activation == activation
    assert net.param_count() == (2 * 7 + 7) + (7 * 5 + 5) + (5 * 1 + 1)

    path = tmp_path / "net.json"
    xl.save_mlp(net, str(path))
    ck = json.loads(path.read_text())
    schema_validator("network_checkpoint.schema.json").validate(ck)

    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.uniform(-1.5, 1.5, size=2)
        assert xl.forward(net, list(x)) == pytest.approx(np_forward(ck, x), rel=1e-12)

    again = xl.load_mlp(str(path))
    x = [0.3, -0.8]
    assert xl.forward(again, x) == xl.forward(net, x)


@pytest.mark.parametrize("activation", ["tanh", "sine"])
def test_input_derivatives_match_finite_differences(activation):
    net = xl.make_mlp([2, 8, 8, 1], activation, seed=5)
    rng = np.random.default_rng(7)
    for _ in range(5):
        x = rng.uniform(-1.0, 1.0, size=2)
        g = np.asarray(xl.input_gradient(net, list(x)))
        hess = np.asarray(xl.input_hessian(net, list(x)))
        assert hess.shape == (2, 2)
        assert abs(hess[0, 1] - hess[1, 0]) <= 1e-12

        h = 1e-5
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            fd = (xl.forward(net, list(x + e)) - xl.forward(net, list(x - e))) / (2 * h)
            assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-7)
            for j in range(2):
                ej = np.zeros(2)
                ej[j] = h
                fd2 = (xl.input_gradient(net, list(x + ej))[i]
                       - xl.input_gradient(net, list(x - ej))[i]) / (2 * h)
                assert hess[i, j] == pytest.approx(fd2, rel=1e-4, abs=1e-6)


def test_directional_jet_consistent_with_gradient_and_hessian():
    net = xl.make_mlp([2, 6, 6, 1], "tanh", seed=9)
    x = [0.25, -0.4]
    g = xl.input_gradient(net, x)
    hess = xl.input_hessian(net, x)
    for axis in (0, 1):
        v, d1, d2, d3 = xl.directional_jet(net, x, axis, 3)
        assert v == pytest.approx(xl.forward(net, x), rel=1e-14)
        assert d1 == pytest.approx(g[axis], rel=1e-12, abs=1e-12)
        assert d2 == pytest.approx(hess[axis][axis], rel=1e-12, abs=1e-12)
        # 5-point stencil for the third derivative along the axis
        h = 1e-2
        xs = []
        for k in (2, 1, -1, -2):
            p = list(x)
            p[axis] += k * h
            xs.append(xl.forward(net, p))
        fd3 = (xs[0] - 2 * xs[1] + 2 * xs[2] - xs[3]) / (2 * h**3)
        assert d3 == pytest.approx(fd3, rel=1e-3, abs=1e-5)


def test_spectral_and_group_norms_match_numpy():
    rng = np.random.default_rng(3)
    for _ in range(50):
        r, c = rng.integers(1, 17, size=2)
        a = rng.normal(scale=rng.choice([1e-3, 1.0, 30.0]), size=(int(r), int(c)))
        rows = [list(row) for row in a]
        spc = xl.spectral_norm(rows)
        n21 = xl.norm_2_1(rows)
        svd_top = float(np.linalg.svd(a, compute_uv=False)[0])
        assert spc == pytest.approx(svd_top, rel=1e-8, abs=1e-10)
        assert n21 == pytest.approx(float(np.linalg.norm(a, axis=0).sum()), rel=1e-12)
        fro = float(np.linalg.norm(a))
        assert spc <= fro + 1e-12 <= n21 + 2e-12


def test_path_norm_matches_numpy(tmp_path):
    net = xl.make_mlp([2, 5, 4, 1], "tanh", seed=21)
    path = tmp_path / "net.json"
    xl.save_mlp(net, str(path))
    ck = json.loads(path.read_text())
    dims = ck["dims"]
    acc = None
    for l, layer in enumerate(ck["layers"]):
        w = np.abs(np.asarray(layer["w"]).reshape(dims[l + 1], dims[l]))
        acc = w if acc is None else w @ acc
    assert xl.path_norm(net) == pytest.approx(float(acc.sum()), rel=1e-12)


def test_bound_report_fields_and_monotonicity():
    net = xl.make_mlp([2, 6, 1], "tanh", seed=13)
    rep = xl.bound_report(net, benchmark="poisson", n_b=100, n_r=1000,
                          delta=0.1, c1=2.0, include_bias=True)
    for key in ("model", "n_b", "n_r", "delta", "delta_mn", "boundary", "residual",
                "l2", "caps_m", "caps_n", "complexity_spectral", "complexity_full",
                "out_of_assumption"):
        assert key in rep
    assert rep["boundary"] is not None and rep["boundary"] > 0
    assert rep["residual"] > 0
    assert 0 < rep["delta_mn"] < rep["delta"]
    assert not rep["out_of_assumption"]
    assert all(m >= 1 for m in rep["caps_m"])
    assert all(n >= 1 for n in rep["caps_n"])
    assert rep["l2"] == pytest.approx(
        math.sqrt(2.0) / 2.0 * math.sqrt(rep["boundary"] + rep["residual"]), rel=1e-12)

    # more samples tighten, a stricter confidence level loosens
    tighter = xl.bound_report(net, benchmark="poisson", n_b=400, n_r=4000,
                              delta=0.1, c1=2.0, include_bias=True)
    assert tighter["boundary"] < rep["boundary"]
    assert tighter["residual"] < rep["residual"]
    strict = xl.bound_report(net, benchmark="poisson", n_b=100, n_r=1000,
                             delta=0.01, c1=2.0, include_bias=True)
    assert strict["boundary"] > rep["boundary"]
    assert strict["residual"] > rep["residual"]

    flagged = xl.bound_report(net, benchmark="kdv", n_b=100, n_r=1000,
                              delta=0.1, c1=2.0, include_bias=True)
    assert flagged["out_of_assumption"]


def test_prior_comparisons_reproduce_closed_forms():
    broken = xl.prior_compare_broken_line(2.0, 1.0)
    assert broken["single"] == pytest.approx(27.0, abs=1e-9)
    assert broken["decomposed"] == pytest.approx(9.0 / math.sqrt(2.0), abs=1e-9)
    assert broken["verdict"] == "xpinn"

    diag = xl.prior_compare_diagonal(2.0, 0.5)
    assert diag["single"] == pytest.approx(15.625, abs=1e-9)
    assert diag["decomposed"] == pytest.approx(23.625 / math.sqrt(2.0), abs=1e-9)
    assert diag["verdict"] == "pinn"

    qstar = xl.prior_crossover_q(0.0, 2.0, 1e-10)
    assert qstar == pytest.approx((8.0 / (math.sqrt(2.0) - 1.0)) ** (1.0 / 3.0) - 2.0,
                                  abs=1e-6)


def test_mix_seed_is_deterministic():
    assert xl.mix_seed(2026, 7) == xl.mix_seed(2026, 7)
    assert xl.mix_seed(2026, 7) != xl.mix_seed(2026, 8)


def test_invalid_input_maps_to_value_error(tmp_path):
    with pytest.raises(ValueError):
        xl.spectral_norm([[1.0], [2.0, 3.0]])  # ragged
    with pytest.raises(ValueError):
        xl.make_mlp([3], "tanh", seed=0)
    with pytest.raises(ValueError):
        xl.make_mlp([2, 4, 1], "relu", seed=0)
    with pytest.raises(ValueError):
        xl.load_mlp(str(tmp_path / "missing.json"))
    net = xl.make_mlp([2, 4, 1], "tanh", seed=0)
    with pytest.raises(ValueError):
        xl.bound_report(net, benchmark="poisson", n_b=10, n_r=100,
                        delta=1.5, c1=1.0, include_bias=True)


def test_format_sci_round_trip():
    s = xl.format_sci(0.000123456)
    assert float(s) == pytest.approx(0.000123456, rel=1e-3)


# ---------------------------------------------------------------- CLI

CONFIG = """schema = 1
benchmark = "heat"
model = "{model}"
seeds = [0, 1]
out = "{out}"

[net]
hidden = [6, 6]
activation = "tanh"

[train]
optimizer = "adam"
lr = {lr}
epochs = {epochs}
record_every = 20

[points]
boundary = 16
residual = 48
interface = 8

[weights]
boundary = 20.0
interface_u = 20.0

[eval]
grid = [21, 21]
"""


@pytest.fixture(scope="session")
def cli_runs(tmp_path_factory):
    if not BIN.exists():
        pytest.skip(f"CLI binary not found at {BIN}")
    root = tmp_path_factory.mktemp("cli")
    dirs = {}
    for model in ("pinn", "xpinn"):
        out = root / model
        cfg = root / f"{model}.toml"
        cfg.write_text(CONFIG.format(model=model, out=out.as_posix(),
                                     lr=5e-3, epochs=40))
        proc = run_cli("train", str(cfg))
        assert proc.returncode == 0, proc.stderr + proc.stdout
        dirs[model] = out
    dirs["root"] = root
    return dirs


def test_cli_train_summary_validates(cli_runs):
    validator = schema_validator("train_summary.schema.json")
    for model in ("pinn", "xpinn"):
        summary = json.loads((cli_runs[model] / "summary.json").read_text())
        validator.validate(summary)
        assert summary["model"] == model
        assert summary["artifact_hash"].startswith("fnv1a:")
        for seed in summary["seeds"]:
            assert not seed["diverged"]
            assert seed["rel_l2"] is not None
    xs = json.loads((cli_runs["xpinn"] / "summary.json").read_text())
    assert len(xs["parts"]) == 2
    assert xs["seeds"][0]["bounds"]["model"] == "XPINN"


def test_cli_per_seed_files_validate(cli_runs):
    ck_validator = schema_validator("network_checkpoint.schema.json")
    opt_validator = schema_validator("optimizer_state.schema.json")
    summary = json.loads((cli_runs["xpinn"] / "summary.json").read_text())
    seed0 = summary["seeds"][0]
    assert seed0["checkpoints"] == ["net_seed0_part0.json", "net_seed0_part1.json"]
    for name in seed0["checkpoints"]:
        ck_validator.validate(json.loads((cli_runs["xpinn"] / name).read_text()))
    opt = json.loads((cli_runs["xpinn"] / seed0["optimizer_state"]).read_text())
    opt_validator.validate(opt)
    assert opt["optimizer"] == "adam"
    hist = (cli_runs["xpinn"] / seed0["history_csv"]).read_text().splitlines()
    assert hist[0] == "epoch,total,boundary,residual,interface_u,interface_res,interface_grad"
    assert len(hist) >= 3  # recorded epochs plus the final state


def test_cli_train_is_reproducible(cli_runs, tmp_path):
    cfg = cli_runs["root"] / "pinn.toml"
    rerun = tmp_path / "rerun"
    proc = run_cli("train", str(cfg), "--out", str(rerun))
    assert proc.returncode == 0, proc.stderr
    a = json.loads((cli_runs["pinn"] / "summary.json").read_text())
    b = json.loads((rerun / "summary.json").read_text())
    assert a["artifact_hash"] == b["artifact_hash"]


def test_cli_bounds_single_and_split(cli_runs, tmp_path):
    validator = schema_validator("bounds_report.schema.json")
    base = cli_runs["pinn"] / "net_seed0.json"
    subs = [cli_runs["xpinn"] / f"net_seed0_part{i}.json" for i in range(2)]

    single = tmp_path / "single"
    proc = run_cli("bounds", str(base), "--benchmark", "heat",
                   "--nb", "16", "--nr", "48", "--out", str(single))
    assert proc.returncode == 0, proc.stderr
    report = json.loads((single / "bounds.json").read_text())
    validator.validate(report)
    assert "report" in report

    split = tmp_path / "split"
    proc = run_cli("bounds", str(base), *map(str, subs), "--benchmark", "heat",
                   "--nb", "16", "--nr", "48", "--out", str(split))
    assert proc.returncode == 0, proc.stderr
    cmp_report = json.loads((split / "bounds.json").read_text())
    validator.validate(cmp_report)
    assert cmp_report["verdict"] in ("pinn", "xpinn", "tie")
    assert len(cmp_report["sub"]) == 2
    assert cmp_report["delta_per_subnet"] == pytest.approx(0.05)
    assert (split / "bounds.csv").read_text().startswith(
        "model,train_loss,rel_l2,complexity_spectral_pct,bound_pct,bound_raw")


def test_cli_compare_validates(cli_runs, tmp_path):
    out = tmp_path / "cmp"
    proc = run_cli("compare", str(cli_runs["pinn"]), str(cli_runs["xpinn"]),
                   "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    report = json.loads((out / "compare.json").read_text())
    schema_validator("compare_report.schema.json").validate(report)
    assert report["baseline"] == "PINN"
    labels = {row["model"] for row in report["rows"]}
    assert "PINN" in labels and "XPINN-heat" in labels
    assert report["smallest_bound"] in labels


def test_cli_exit_codes(tmp_path):
    if not BIN.exists():
        pytest.skip(f"CLI binary not found at {BIN}")
    assert run_cli("check").returncode == 0
    ex = run_cli("example", "4.1")
    assert ex.returncode == 0
    assert "27" in ex.stdout

    assert run_cli("nonsense").returncode == 2
    assert run_cli("train", str(tmp_path / "missing.toml")).returncode == 2

    bad_schema = tmp_path / "bad.toml"
    bad_schema.write_text('schema = 99\nbenchmark = "heat"\n')
    assert run_cli("train", str(bad_schema)).returncode == 2

    cfg = tmp_path / "env.toml"
    cfg.write_text(CONFIG.format(model="pinn", out=(tmp_path / "env_out").as_posix(),
                                 lr=5e-3, epochs=1))
    assert run_cli("train", str(cfg),
                   env_extra={"XPINN_LAB_THREADS": "zero"}).returncode == 2


def test_cli_divergence_exits_3(tmp_path):
    if not BIN.exists():
        pytest.skip(f"CLI binary not found at {BIN}")
    out = tmp_path / "diverged"
    cfg = tmp_path / "diverge.toml"
    cfg.write_text(CONFIG.format(model="pinn", out=out.as_posix(),
                                 lr=1e4, epochs=50))
    proc = run_cli("train", str(cfg))
    assert proc.returncode == 3
    summary = json.loads((out / "summary.json").read_text())
    schema_validator("train_summary.schema.json").validate(summary)
    assert all(seed["diverged"] for seed in summary["seeds"])
    assert all(seed["rel_l2"] is None for seed in summary["seeds"])
