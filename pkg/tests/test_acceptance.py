"""Acceptance gate: one test per release criterion, each printing a
[PASS]/[FAIL] line. Run with `pytest tests/test_acceptance.py -v -s`.

Everything here runs against the installed package alone; no frontend or
external model is involved.
"""

import contextlib
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from oracles import compose_mask_oracle, laplace_solve_oracle
from wayclear.canyon import classify_canyon
from wayclear.cli import run_command
from wayclear.diffusion import diffusion_inpaint
from wayclear.errors import StudyError
from wayclear.ffc import ffc_forward, random_block_weights
from wayclear.fourier import irfft2, rfft2, spectrum_energy
from wayclear.generator import generator_forward, random_generator_weights, toy_weights_path
from wayclear.masks import (
    binarize_saliency,
    classify_levels,
    compose_inpaint_mask,
    default_level_spec,
)
from wayclear.metrics import compute_quality, compute_vd, compute_vo
from wayclear.rasters import InpaintMask, LabelMap, RgbImage, ScalarMap
from wayclear.study import (
    ImagePair,
    StudyPlan,
    TargetBox,
    TrialRecord,
    assign_condition,
    compute_improvement,
    summarize_study,
)

FIXTURES = Path(__file__).parent / "fixtures"


@contextlib.contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


# --- mask composition --------------------------------------------------------

CLASS_POOL = [11, 24, 25, 26, 27, 17, 19, 23, 7, 0]  # levels 0-3 plus neutrals


def random_mask_corpus(n: int):
    rng = np.random.default_rng(1234)
    spec = default_level_spec()
    for _ in range(n):
        h = int(rng.integers(1, 17))
        w = int(rng.integers(1, 17))
        ids = rng.choice(CLASS_POOL, size=int(rng.integers(1, 7)), replace=False)
        classes = rng.choice(ids, size=(h, w)).astype(np.uint8)
        salient = rng.random((h, w)) < float(rng.uniform(0.0, 0.5))
        yield spec, classes, salient


def test_mask_composition_matches_bruteforce_oracle():
    with criterion("mask composition equals per-pixel oracle on 1000 random instances (<10 s)"):
        started = time.perf_counter()
        level_sets = [set(ids) for ids in default_level_spec().levels()]
        for spec, classes, salient in random_mask_corpus(1000):
            part = classify_levels(LabelMap(classes=classes), spec)
            out = compose_inpaint_mask(InpaintMask(bits=salient), part)
            expected = compose_mask_oracle(salient, classes, level_sets)
            assert np.array_equal(out.bits, expected)
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"took {elapsed:.2f} s"


def test_interest_region_never_masked():
    with criterion("composed masks never intersect the interest region (0 violations)"):
        violations = 0
        for spec, classes, salient in random_mask_corpus(1000):
            part = classify_levels(LabelMap(classes=classes), spec)
            out = compose_inpaint_mask(InpaintMask(bits=salient), part)
            violations += int(np.any(out.bits & part.building))
        assert violations == 0


# --- spectral numerics -------------------------------------------------------

def test_fft_and_block_numerics():
    with criterion(
        "FFT roundtrip<=1e-6, Parseval<=1e-4, block linearity<=1e-5, "
        "receptive field by branch split (<60 s)"
    ):
        started = time.perf_counter()
        rng = np.random.default_rng(99)

        for h, w in [(1, 1), (3, 5), (8, 8), (16, 16), (33, 31), (64, 64), (128, 128)]:
            t = rng.standard_normal((2, h, w)).astype(np.float32)
            assert np.abs(irfft2(rfft2(t), (h, w)) - t).max() <= 1e-6, (h, w)
            spatial = float((t.astype(np.float64) ** 2).sum())
            spectral = spectrum_energy(rfft2(t), w) / (h * w)
            assert abs(spectral - spatial) / spatial <= 1e-4, (h, w)

        for ratio in (0.0, 0.25, 0.5, 0.75):
            block = random_block_weights(
                8, ratio, activation="identity", rng=np.random.default_rng(7), zero_bias=True
            )
            x = rng.standard_normal((8, 16, 16)).astype(np.float32)
            assert np.abs(ffc_forward(2 * x, block) - 2 * ffc_forward(x, block)).max() <= 1e-5

        size = 16
        for ratio in (0.25, 0.5, 0.75):
            block = random_block_weights(
                8, ratio, activation="identity", rng=np.random.default_rng(11)
            )
            x = rng.standard_normal((8, size, size)).astype(np.float32)
            poked = x.copy()
            poked[:, 0, 0] += 1.0
            diff = np.abs(ffc_forward(poked, block) - ffc_forward(x, block)).max(axis=0)
            changed = np.argwhere(diff > 1e-9)
            assert np.abs(changed).max() >= size // 2, f"ratio {ratio} stayed local"

        block = random_block_weights(8, 0.0, activation="identity", rng=np.random.default_rng(13))
        x = rng.standard_normal((8, size, size)).astype(np.float32)
        poked = x.copy()
        poked[:, 0, 0] += 1.0
        diff = np.abs(ffc_forward(poked, block) - ffc_forward(x, block)).max(axis=0)
        changed = np.argwhere(diff > 1e-9)
        assert changed.size > 0 and np.abs(changed).max() <= 1, "locality violated at ratio 0"

        elapsed = time.perf_counter() - started
        assert elapsed < 60.0, f"took {elapsed:.2f} s"


# --- inpainting contracts ----------------------------------------------------

def test_inpainting_contracts():
    with criterion(
        "unmasked pixels bit-identical (both engines), diffusion max principle, "
        "diffusion==dense solve within 1e-3 on 32x32"
    ):
        rng = np.random.default_rng(4242)
        weights = random_generator_weights(base_width=8, global_ratio=0.5, seed=17)

        for i in range(100):
            h = int(rng.integers(12, 40))
            w = int(rng.integers(12, 40))
            img = RgbImage(pixels=rng.random((3, h, w)).astype(np.float32))
            bits = rng.random((h, w)) < float(rng.uniform(0.05, 0.4))
            bits[0, 0] = False  # never a full mask
            mask = InpaintMask(bits=bits)

            gen = generator_forward(img, mask, weights)
            assert np.array_equal(gen.pixels[:, ~bits], img.pixels[:, ~bits]), f"generator #{i}"

            diffused = diffusion_inpaint(img, mask, tol=1e-7, max_iters=30000)
            assert np.array_equal(
                diffused.pixels[:, ~bits], img.pixels[:, ~bits]
            ), f"diffusion #{i}"
            if bits.any():
                boundary = _mask_boundary_values(img.pixels, bits)
                filled = diffused.pixels[:, bits]
                assert filled.min() >= boundary.min() - 1e-6, f"max principle #{i}"
                assert filled.max() <= boundary.max() + 1e-6, f"max principle #{i}"

        for i in range(10):
            img = RgbImage(pixels=rng.random((3, 32, 32)).astype(np.float32))
            bits = np.zeros((32, 32), dtype=bool)
            top, left = rng.integers(2, 22, 2)
            bits[top : top + 8, left : left + 8] = True
            out = diffusion_inpaint(img, InpaintMask(bits=bits), tol=1e-9, max_iters=100000)
            for c in range(3):
                expected = laplace_solve_oracle(img.pixels[c].astype(np.float64), bits)
                assert np.abs(out.pixels[c] - expected).max() <= 1e-3, f"dense solve #{i}"


def _mask_boundary_values(pixels: np.ndarray, bits: np.ndarray) -> np.ndarray:
    h, w = bits.shape
    boundary = np.zeros_like(bits)
    ys, xs = np.nonzero(bits)
    for y, x in zip(ys, xs):
        for yy, xx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
            if 0 <= yy < h and 0 <= xx < w and not bits[yy, xx]:
                boundary[yy, xx] = True
    if not boundary.any():  # fully interior-less masks cannot occur here
        raise AssertionError("mask has no boundary")
    return pixels[:, boundary]


# --- metric closed forms -----------------------------------------------------

def test_metric_closed_forms():
    with criterion(
        "quality closed forms (l1/PSNR/SSIM), PSNR noise monotonicity, "
        "attention hand sums to 1e-12 and scale invariance"
    ):
        rng = np.random.default_rng(31)
        img = RgbImage(pixels=rng.random((3, 24, 24)).astype(np.float32))
        q = compute_quality(img, img)
        assert q.l1 == 0.0 and q.psnr_db == 100.0 and abs(q.ssim - 1.0) < 1e-9

        base = (rng.random((3, 24, 24)) * 0.8).astype(np.float32)
        q = compute_quality(RgbImage(pixels=base), RgbImage(pixels=base + np.float32(0.1)))
        assert abs(q.l1 - 0.1) < 1e-6
        assert abs(q.psnr_db - 20.0) <= 0.01

        ref = RgbImage(pixels=(rng.random((3, 24, 24)) * 0.5 + 0.25).astype(np.float32))
        previous = np.inf
        for sigma in (0.01, 0.02, 0.05, 0.1, 0.2):
            noisy = ref.pixels + rng.normal(0, sigma, ref.pixels.shape).astype(np.float32)
            psnr = compute_quality(ref, RgbImage(pixels=noisy.astype(np.float32))).psnr_db
            assert psnr < previous
            previous = psnr

        # dyadic fixtures: the ratio is exact, hand sums match to 1e-12
        before = ScalarMap(values=np.array([[0.25, 0.375]], dtype=np.float32))
        after = ScalarMap(values=np.array([[0.5, 0.125]], dtype=np.float32))
        r = np.ones((1, 2), dtype=bool)
        assert abs(compute_vo(before, after, r) - 0.0) <= 1e-12
        hand_vd = ((0.25 - 0.5) + (0.375 - 0.125)) / (0.25 + 0.375)
        assert abs(compute_vd(before, after, r) - hand_vd) <= 1e-12

        # scaling by {0.5, 2, 10} on a 1/256-lattice map is exact in float32
        lattice = rng.integers(0, 26, size=(8, 8))
        before_values = (lattice / 256.0).astype(np.float32)
        after_values = (rng.integers(0, 26, size=(8, 8)) / 256.0).astype(np.float32)
        before_values[0, 0] = np.float32(10 / 256)
        mask = rng.random((8, 8)) < 0.5
        mask[0, 0] = True
        vo = compute_vo(ScalarMap(values=before_values), ScalarMap(values=after_values), mask)
        vd = compute_vd(ScalarMap(values=before_values), ScalarMap(values=after_values), mask)
        for factor in (0.5, 2.0, 10.0):
            sb = ScalarMap(values=before_values * np.float32(factor))
            sa = ScalarMap(values=after_values * np.float32(factor))
            assert abs(compute_vo(sb, sa, mask) - vo) <= 1e-12
            assert abs(compute_vd(sb, sa, mask) - vd) <= 1e-12


# --- study arithmetic --------------------------------------------------------

def crossover_plan(pairs_per_dataset: int = 3) -> StudyPlan:
    pair = lambda pid: ImagePair(
        pair_id=pid,
        original_image=f"{pid}_orig.png",
        inpainted_image=f"{pid}_inp.png",
        image_width=64,
        image_height=48,
        target_name="door",
        target_box=TargetBox(x=1, y=1, width=4, height=4),
    )
    return StudyPlan(
        groups=("Group_1", "Group_2"),
        datasets={
            "Data_1": tuple(pair(f"d1p{i}") for i in range(pairs_per_dataset)),
            "Data_2": tuple(pair(f"d2p{i}") for i in range(pairs_per_dataset)),
        },
        assignment={
            ("Group_1", "Data_1"): "original",
            ("Group_1", "Data_2"): "inpainted",
            ("Group_2", "Data_1"): "inpainted",
            ("Group_2", "Data_2"): "original",
        },
    )


def test_study_arithmetic():
    with criterion(
        "improvement arithmetic (38.85/37.97/26.72/29.99 +-0.01), crossover table, "
        "0.6x synthetic study -> 40% within 1e-9"
    ):
        assert compute_improvement(0.4165, 0.2547) == pytest.approx(38.85, abs=0.01)
        assert compute_improvement(0.4569, 0.2834) == pytest.approx(37.97, abs=0.01)
        assert compute_improvement(0.5059, 0.3707) == pytest.approx(26.72, abs=0.01)
        assert compute_improvement(0.4669, 0.3269) == pytest.approx(29.99, abs=0.01)

        plan = crossover_plan()
        assert assign_condition(plan, "Group_1", "Data_1") == "original"
        assert assign_condition(plan, "Group_1", "Data_2") == "inpainted"
        assert assign_condition(plan, "Group_2", "Data_1") == "inpainted"
        assert assign_condition(plan, "Group_2", "Data_2") == "original"
        with pytest.raises(StudyError):
            StudyPlan(
                groups=("Group_1", "Group_2"),
                datasets=plan.datasets,
                assignment={
                    ("Group_1", "Data_1"): "original",
                    ("Group_1", "Data_2"): "inpainted",
                    ("Group_2", "Data_1"): "original",
                    ("Group_2", "Data_2"): "inpainted",
                },
            )

        # inpainted durations exactly 0.6x the original durations per volunteer
        original = [0, 1000, 2000]
        inpainted = [0, 600, 1200]
        trials = []
        for volunteer, group in (("v1", "Group_1"), ("v2", "Group_2")):
            for dataset, pairs in plan.datasets.items():
                condition = assign_condition(plan, group, dataset)
                source = original if condition == "original" else inpainted
                for p, duration in zip(pairs, source):
                    trials.append(
                        TrialRecord(
                            volunteer_id=volunteer,
                            pair_id=p.pair_id,
                            condition=condition,
                            shown_at=10_000,
                            found_at=10_000 + duration,
                            duration_ms=duration,
                            click=(2.0, 2.0),
                            hit=True,
                        )
                    )
        report = summarize_study(plan, trials)
        oracle = _offline_oracle(plan, trials)
        for summary in report.summaries:
            mo, mi, improvement = oracle[summary.dataset]
            assert abs(summary.mean_original - mo) <= 1e-12
            assert abs(summary.mean_inpainted - mi) <= 1e-12
            assert abs(summary.improvement_pct - improvement) <= 1e-9
            assert abs(summary.improvement_pct - 40.0) <= 1e-9


def _offline_oracle(plan, trials):
    """Flat spreadsheet-style recomputation of the study summary."""
    pair_dataset = {p.pair_id: ds for ds, pairs in plan.datasets.items() for p in pairs}
    by_volunteer: dict[str, list] = {}
    for t in trials:
        by_volunteer.setdefault(t.volunteer_id, []).append(t)
    norm: dict[str, dict[str, float]] = {}
    for vol, recs in by_volunteer.items():
        values = [r.duration_ms for r in recs]
        lo, hi = min(values), max(values)
        if len(values) < 2 or hi == lo:
            continue
        norm[vol] = {r.pair_id: (r.duration_ms - lo) / (hi - lo) for r in recs}
    out = {}
    for dataset in plan.datasets:
        sums = {"original": [], "inpainted": []}
        for vol, values in norm.items():
            mine = [(pid, v) for pid, v in values.items() if pair_dataset[pid] == dataset]
            if not mine:
                continue
            condition = next(
                t.condition for t in by_volunteer[vol] if t.pair_id == mine[0][0]
            )
            sums[condition].append(sum(v for _, v in mine) / len(mine))
        mo = sum(sums["original"]) / len(sums["original"])
        mi = sum(sums["inpainted"]) / len(sums["inpainted"])
        out[dataset] = (mo, mi, (mo - mi) / mo * 100.0)
    return out


# --- canyon buckets ----------------------------------------------------------

def test_canyon_bucket_boundaries():
    with criterion("aspect-ratio buckets at {0, 0.5, 1, 1.5, 2, 2.5}"):
        expected = ["non_canyon", "low", "low", "mid", "mid", "high"]
        got = [classify_canyon(a).bucket for a in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5)]
        assert got == expected


# --- service persistence across a hard kill ----------------------------------

def _free_port() -> int:
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    return port


def _start_service(store_dir: Path, images_dir: Path, port: int) -> subprocess.Popen:
    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "wayclear.cli",
            "serve",
            "--store",
            str(store_dir),
            "--images",
            str(images_dir),
            "--port",
            str(port),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    import httpx

    deadline = time.time() + 20
    while time.time() < deadline:
        try:
            httpx.get(f"http://127.0.0.1:{port}/docs", timeout=1.0)
            return proc
        except Exception:
            if proc.poll() is not None:
                raise RuntimeError("service exited during startup")
            time.sleep(0.15)
    proc.kill()
    raise RuntimeError("service did not come up")


def test_service_survives_hard_kill(tmp_path):
    with criterion("hard kill after N acknowledged trials; restart recovers exactly N"):
        import httpx

        from wayclear.rasters import encode_raster
        from wayclear.study import StudyStore, plan_to_dict

        store_dir = tmp_path / "store"
        images_dir = tmp_path / "images"
        images_dir.mkdir()
        rng = np.random.default_rng(0)
        plan = crossover_plan(pairs_per_dataset=3)
        for _, pairs in plan.datasets.items():
            for p in pairs:
                for name in (p.original_image, p.inpainted_image):
                    img = RgbImage(pixels=rng.random((3, 48, 64)).astype(np.float32))
                    (images_dir / name).write_bytes(encode_raster(img))

        port = _free_port()
        proc = _start_service(store_dir, images_dir, port)
        base = f"http://127.0.0.1:{port}"
        try:
            study_id = httpx.post(f"{base}/studies", json=plan_to_dict(plan)).json()["study_id"]
            session_id = httpx.post(
                f"{base}/studies/{study_id}/sessions",
                json={"volunteer_id": "v-kill", "group": "Group_1"},
            ).json()["session_id"]
            acknowledged = 0
            for _ in range(4):  # 4 of the 6 assigned trials
                nxt = httpx.get(f"{base}/sessions/{session_id}/next").json()
                httpx.get(base + nxt["image_url"])
                time.sleep(0.002)
                ack = httpx.post(
                    f"{base}/sessions/{session_id}/trials",
                    json={
                        "pair_id": nxt["pair_id"],
                        "started_token": nxt["started_token"],
                        "click": {"x": 2, "y": 2},
                    },
                )
                assert ack.status_code == 200
                acknowledged += 1
        finally:
            proc.send_signal(signal.SIGKILL)
            proc.wait()

        recovered = StudyStore(store_dir)
        assert len(recovered.trials(study_id)) == acknowledged
        recovered.close()

        proc = _start_service(store_dir, images_dir, port)
        try:
            nxt = httpx.get(f"{base}/sessions/{session_id}/next").json()
            assert nxt["done"] is False  # session resumes at trial #5
            remaining = {nxt["pair_id"]}
            ack = httpx.post(
                f"{base}/sessions/{session_id}/trials",
                json={
                    "pair_id": nxt["pair_id"],
                    "started_token": nxt["started_token"],
                    "click": {"x": 2, "y": 2},
                },
            )
            assert ack.status_code == 200
        finally:
            proc.send_signal(signal.SIGKILL)
            proc.wait()

        final = StudyStore(store_dir)
        assert len(final.trials(study_id)) == acknowledged + 1
        final.close()


# --- CLI golden run ----------------------------------------------------------

def test_cli_golden_run_determinism(tmp_path):
    with criterion("end-to-end CLI run on the shipped fixtures is byte-identical twice"):
        import io
        from contextlib import redirect_stdout

        def one_run(base: Path) -> tuple:
            base.mkdir()
            stdout = io.StringIO()
            with redirect_stdout(stdout):
                assert (
                    run_command(
                        [
                            "--seed",
                            "11",
                            "compose-mask",
                            "--labels",
                            str(FIXTURES / "street_labels.png"),
                            "--saliency",
                            str(FIXTURES / "street_saliency.png"),
                            "--out",
                            str(base / "mask.png"),
                        ]
                    )
                    == 0
                )
                assert (
                    run_command(
                        [
                            "--seed",
                            "11",
                            "inpaint",
                            "--image",
                            str(FIXTURES / "street.png"),
                            "--labels",
                            str(FIXTURES / "street_labels.png"),
                            "--saliency",
                            str(FIXTURES / "street_saliency.png"),
                            "--attn-before",
                            str(FIXTURES / "street_attn_before.png"),
                            "--attn-after",
                            str(FIXTURES / "street_attn_after.png"),
                            "--weights",
                            str(toy_weights_path()),
                            "--out",
                            str(base / "out.png"),
                            "--mask-out",
                            str(base / "mask2.png"),
                            "--record-out",
                            str(base / "records.jsonl"),
                        ]
                    )
                    == 0
                )
                assert (
                    run_command(
                        [
                            "metrics",
                            "--ref",
                            str(FIXTURES / "street.png"),
                            "--cand",
                            str(base / "out.png"),
                        ]
                    )
                    == 0
                )
            return (
                (base / "mask.png").read_bytes(),
                (base / "out.png").read_bytes(),
                (base / "mask2.png").read_bytes(),
                (base / "records.jsonl").read_bytes(),
                stdout.getvalue().replace(str(base), "BASE"),  # runs write to distinct dirs
            )

        assert one_run(tmp_path / "run1") == one_run(tmp_path / "run2")
