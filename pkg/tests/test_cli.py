import csv
import subprocess
import sys

import numpy as np
import pytest

from umgf.cli import main
from umgf.guided import GuidedParams, guided_filter
from umgf.io import load_image, save_image
from umgf.lowpass import LowPassSpec
from umgf.pipelines import MethodParams, SynthSpec, synth_corpus, synth_pair, upsample_pipeline
from umgf.unsharp import AmountRule, successive_filter


def f32(img):
    return np.asarray(img, dtype=np.float32).astype(np.float64)


@pytest.fixture
def image(tmp_path):
    img = synth_corpus(SynthSpec(48, 40, "texture", seed=1))
    path = tmp_path / "in.pfm"
    save_image(img, path)
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_umgf_zero_amount_is_lowpass(tmp_path, image):
    out = tmp_path / "out.pfm"
    assert main(["filter", "--input", str(image), "--method", "umgf", "--amount", "constant:0",
                 "--lowpass", "box:4", "--output", str(out)]) == 0
    I = load_image(image)
    np.testing.assert_array_equal(load_image(out), f32(LowPassSpec("box", radius=4).apply(I)))


def test_gf_smoothing_configuration(tmp_path, image):
    out = tmp_path / "out.pfm"
    assert main(["filter", "--input", str(image), "--method", "gf", "--radius", "8", "--eps", "0.0025",
                 "--output", str(out)]) == 0
    I = load_image(image)
    np.testing.assert_array_equal(load_image(out), f32(guided_filter(I, I, GuidedParams(8, 0.05**2))))


def test_iters_write_suffixed_outputs(tmp_path, image):
    out = tmp_path / "out.pfm"
    assert main(["filter", "--input", str(image), "--method", "umgf", "--amount", "gf", "--radius", "2",
                 "--eps", "0.01", "--lowpass", "cbox:2,2", "--iters", "3", "--output", str(out),
                 "--dump-amount", str(tmp_path / "amount.pfm")]) == 0
    I = load_image(image)
    want = successive_filter(I, I, AmountRule("gf", GuidedParams(2, 0.01)),
                             LowPassSpec("cascaded_box", radius=2, count=2), 3)
    for k in range(1, 4):
        np.testing.assert_array_equal(load_image(tmp_path / f"out_{k}.pfm"), f32(want[k - 1]))
        assert (tmp_path / f"amount_{k}.pfm").exists()
    assert not out.exists()


def test_external_amount_and_coefficient_dump(tmp_path, image):
    coeffs = tmp_path / "coef.pfm"
    assert main(["filter", "--input", str(image), "--radius", "3", "--eps", "0.01",
                 "--output", str(tmp_path / "gf.pfm"), "--dump-coeffs", str(coeffs)]) == 0
    a = tmp_path / "coef_a.pfm"
    assert a.exists() and (tmp_path / "coef_b.pfm").exists()
    out = tmp_path / "ext.pfm"
    assert main(["filter", "--input", str(image), "--method", "umgf", "--amount", f"external:{a}",
                 "--lowpass", "cbox:3,2", "--output", str(out)]) == 0
    I = load_image(image)
    want = successive_filter(I, I, AmountRule("external", a), LowPassSpec("cascaded_box", radius=3, count=2), 1)[0]
    np.testing.assert_array_equal(load_image(out), f32(want))


def test_guidance_converted_to_gray(tmp_path, image):
    rgb = tmp_path / "rgb.ppm"
    g = load_image(image)
    save_image(np.stack([g, 1 - g, g], axis=2), rgb)
    out = tmp_path / "o.pgm"
    assert main(["filter", "--input", str(image), "--guidance", str(rgb), "--output", str(out)]) == 0
    assert load_image(out).ndim == 2


def test_metrics_identical(tmp_path, image, capsys):
    csv_path = tmp_path / "m.csv"
    assert main(["metrics", str(image), str(image), "--csv", str(csv_path)]) == 0
    row = read_csv(csv_path)[0]
    assert float(row["rmse"]) == 0.0 and float(row["ssim"]) == 1.0 and float(row["psnr"]) == 99.0
    assert list(row) == ["path", "method", "params", "rmse", "psnr", "ssim", "epe"]


def corpus(tmp_path, count=4, guidance=False):
    outdir = tmp_path / "corpus"
    args = ["synth", "--kind", "piecewise_constant", "--size", "64x64", "--seed", "5",
            "--count", str(count), "--outdir", str(outdir)]
    if guidance:
        args.append("--with-guidance")
    assert main(args) == 0
    return outdir


def test_denoise_is_deterministic_across_runs_and_pools(tmp_path):
    src = corpus(tmp_path)
    results = []
    for k, jobs in enumerate([1, 1, 3]):
        out = tmp_path / f"out{k}"
        csv_path = tmp_path / f"r{k}.csv"
        assert main(["denoise", "--input", str(src), "--output", str(out), "--sigma", "25", "--seed", "7",
                     "--method", "umgf_gf", "--radius", "2", "--eps", "0.01", "--csv", str(csv_path),
                     "--jobs", str(jobs)]) == 0
        files = sorted(out.iterdir())
        results.append(([f.read_bytes() for f in files], csv_path.read_bytes()))
    assert results[0] == results[1] == results[2]
    assert len(results[0][0]) == 4


def test_upsample_csv_matches_library(tmp_path):
    src = corpus(tmp_path, count=2, guidance=True)
    csv_path = tmp_path / "u.csv"
    assert main(["upsample", "--input", str(src), "--guidance", str(src / "guidance"), "--scale", "4",
                 "--method", "umgf_gf", "--radius", "4", "--eps", "0.0001", "--csv", str(csv_path)]) == 0
    rows = read_csv(csv_path)
    assert len(rows) == 2
    for row in rows:
        name = row["path"].rsplit("/", 1)[-1]
        gt, g = load_image(src / name), load_image(src / "guidance" / name)
        report, _ = upsample_pipeline(gt, g, 4, "umgf_gf", MethodParams(r=4, eps=1e-4))
        assert float(row["rmse"]) == report.rmse
        assert float(row["ssim"]) == report.ssim


def test_synth_manifest(tmp_path):
    src = corpus(tmp_path, count=10)
    images = sorted(src.glob("*.pfm"))
    assert len(images) == 10
    rows = read_csv(src / "manifest.csv")
    assert [r["file"] for r in rows] == [p.name for p in images]
    for row in rows:
        spec = SynthSpec(int(row["width"]), int(row["height"]), row["kind"], int(row["seed"]), int(row["edge_count"]))
        np.testing.assert_array_equal(load_image(src / row["file"]), f32(synth_corpus(spec)))
    again = tmp_path / "again"
    assert main(["synth", "--kind", "piecewise_constant", "--size", "64x64", "--seed", "5", "--count", "10",
                 "--outdir", str(again)]) == 0
    for p in images:
        assert (again / p.name).read_bytes() == p.read_bytes()


def test_synth_guidance(tmp_path):
    src = corpus(tmp_path, count=1, guidance=True)
    _, g = synth_pair(SynthSpec(64, 64, "piecewise_constant", 5))
    np.testing.assert_array_equal(load_image(src / "guidance" / "piecewise_constant_0000.pfm"), f32(g))


def test_enhance(tmp_path, image):
    out = tmp_path / "e.pfm"
    assert main(["enhance", "--input", str(image), "--output", str(out), "--lambda", "0"]) == 0
    np.testing.assert_array_equal(load_image(out), load_image(image))


def test_bench_csv(tmp_path, capsys):
    csv_path = tmp_path / "b.csv"
    assert main(["bench", "--size", "64x48", "--radii", "2,4", "--reps", "1", "--csv", str(csv_path)]) == 0
    rows = read_csv(csv_path)
    assert list(rows[0]) == ["op", "radius", "width", "height", "median_ms"]
    assert {r["radius"] for r in rows} == {"2", "4"}
    assert all(r["width"] == "64" and r["height"] == "48" for r in rows)


@pytest.mark.parametrize("argv", [
    ["filter", "--input", "missing.pfm", "--output", "o.pfm"],
    ["filter", "--output", "o.pfm"],
    ["filter", "--input", "x", "--output", "o.pfm", "--lowpass", "median:3"],
    ["filter", "--input", "x", "--output", "o.pfm", "--amount", "learned"],
    ["filter", "--input", "x", "--output", "o.pfm", "--radius", "0"],
    ["denoise", "--input", "x", "--method", "bilateral"],
    ["bench", "--radii", "a,b"],
    ["nonsense"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_processing_error_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n4 4\n255\n\x00")
    assert main(["filter", "--input", str(bad), "--output", str(tmp_path / "o.pgm")]) == 1
    assert "truncated" in capsys.readouterr().err


def test_config_file(tmp_path, image):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# smoothing\ninput = {image}\nradius = 2\neps = 0.01\nmethod = gf\n")
    out = tmp_path / "o.pfm"
    assert main(["filter", "--config", str(cfg), "--output", str(out)]) == 0
    I = load_image(image)
    np.testing.assert_array_equal(load_image(out), f32(guided_filter(I, I, GuidedParams(2, 0.01))))
    # command-line flags win over the file
    out2 = tmp_path / "o2.pfm"
    assert main(["filter", "--config", str(cfg), "--radius", "4", "--output", str(out2)]) == 0
    np.testing.assert_array_equal(load_image(out2), f32(guided_filter(I, I, GuidedParams(4, 0.01))))


def test_config_unknown_key(tmp_path, image, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("radius = 2\ncolour = blue\n")
    assert main(["filter", "--config", str(cfg), "--input", str(image), "--output", str(tmp_path / "o.pfm")]) == 2
    assert "colour" in capsys.readouterr().err


def test_module_entry_point(tmp_path, image):
    out = tmp_path / "o.pfm"
    proc = subprocess.run([sys.executable, "-m", "umgf", "filter", "--input", str(image), "--output", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_tune_split_holds_out_tuning_images(tmp_path):
    src = corpus(tmp_path, count=3)
    csv_path = tmp_path / "t.csv"
    assert main(["denoise", "--input", str(src), "--sigma", "25", "--seed", "3", "--method", "gf",
                 "--tune-split", "1", "--csv", str(csv_path)]) == 0
    rows = read_csv(csv_path)
    names = sorted(p.name for p in src.glob("*.pfm"))
    assert [r["path"].rsplit("/", 1)[-1] for r in rows] == names[1:]
    from umgf.pipelines import tune_denoise
    best, _ = tune_denoise([load_image(src / names[0])], 25 / 255, [3], "gf")
    assert f"r={best.r}" in rows[0]["params"]


def test_tune_split_must_leave_test_images(tmp_path, capsys):
    src = corpus(tmp_path, count=2)
    assert main(["denoise", "--input", str(src), "--tune-split", "2"]) == 2
