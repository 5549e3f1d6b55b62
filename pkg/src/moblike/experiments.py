"""Experiment runners behind the CLI: growth, omega, zeros, tail decay,
the random multiplicative model, and the verify suite.

Each runner takes a validated :class:`~moblike.config.ExperimentConfig`,
writes CSV reports (plus companion PNG figures unless disabled) and a
``run.meta`` file into the output directory, and returns a summary dict.
Cross-check failures raise :class:`~moblike.errors.VerificationError`; the
CLI turns that into exit code 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import analytic, arith, sieve
from .config import ExperimentConfig
from .errors import ConfigError, VerificationError
from .reports import read_csv_rows, write_csv, write_run_meta
from .rng import presplit_seeds, prime_signs_matrix

__all__ = [
    "RandomModelRun",
    "character_for",
    "run_growth",
    "run_omega",
    "run_zeros",
    "run_tail",
    "run_random_model",
    "run_verify",
    "RUNNERS",
]

HYPERBOLA_X_CAP = 10**10

ZERO_CSV_HEADER = (
    "q", "char_id", "gamma", "simple", "l_re", "l_im", "p_re", "p_im",
    "zeta_prime_re", "zeta_prime_im", "omega_constant", "noncancelled",
)


def character_for(cfg: ExperimentConfig) -> arith.RealCharacter:
    chars = arith.enumerate_real_characters(cfg.q)
    if not chars:
        raise ConfigError(f"q={cfg.q} has no real non-principal character")
    if cfg.char >= len(chars):
        raise ConfigError(
            f"character index {cfg.char} out of range; q={cfg.q} has {len(chars)}"
        )
    return chars[cfg.char]


def _char_defect(q: int, x: int) -> int:
    """sum over p <= x of |1 - f(p) chi(p)|: one per prime divisor of q <= x."""
    return sum(1 for p in arith.prime_divisors(q) if p <= x)


def run_growth(cfg: ExperimentConfig) -> dict:
    """Partial sums of f at a geometric grid, two methods, ratio columns."""
    chi = character_for(cfg)
    cps = sieve.checkpoint_grid(cfg.max, cfg.extras)
    series = sieve.summatory_direct(
        "f", cps, chi=chi, char_id=cfg.char, threads=cfg.threads,
        track_extremes=(0.25, 0.5),
    )
    hyperbola_checked = 0
    for x, direct in zip(series.checkpoints, series.sums):
        if x > HYPERBOLA_X_CAP:
            continue
        via_split = sieve.summatory_hyperbola(chi, x, cfg.split_for(x))
        hyperbola_checked += 1
        if via_split != direct:
            raise VerificationError(
                f"methods disagree at x={x}: hyperbola={via_split}, direct={direct}"
            )
    rows = []
    for x, m in zip(series.checkpoints, series.sums):
        rows.append((
            x, m,
            m / x**0.25, m / x ** (1 / 3), m / x**0.5,
            sieve.vk_envelope(x, cfg.phi_c),
            _char_defect(cfg.q, x),
        ))
    footers = [
        f"sup_quarter_all_x={series.extremes[0.25][0]:.12g}",
        f"sup_quarter_argmax={series.extremes[0.25][1]}",
        f"sup_sqrt_all_x={series.extremes[0.5][0]:.12g}",
        f"sup_sqrt_argmax={series.extremes[0.5][1]}",
        f"hyperbola_checked={hyperbola_checked}",
    ]
    summary = {
        "series": series,
        "sup_quarter": series.extremes[0.25],
        "sup_sqrt": series.extremes[0.5],
        "hyperbola_checked": hyperbola_checked,
        "fit": None,
    }
    try:
        fit = sieve.growth_fit(series)
        footers += [
            f"fit_theta={fit.exponent:.12g}",
            f"fit_constant={fit.constant:.12g}",
        ]
        summary["fit"] = fit
    except sieve.InsufficientDataError:
        footers.append("fit_theta=insufficient-data")
    out = Path(cfg.out)
    path = write_csv(
        out / "growth.csv",
        ("x", "m_f", "ratio_x14", "ratio_x13", "ratio_x12", "phi", "char_defect"),
        rows,
        footers,
    )
    write_run_meta(out, cfg)
    if cfg.figures:
        from .figures import growth_figure

        growth_figure(series.checkpoints, series.sums, out / "growth.png",
                      q=cfg.q, char_id=cfg.char)
    summary["csv"] = path
    return summary


def _zero_rows(q: int, char_id: int, records) -> list[tuple]:
    rows = []
    for r in records:
        rows.append((
            q, char_id, r.gamma, r.simple,
            r.l_value.real, r.l_value.imag,
            r.p_value.real, r.p_value.imag,
            r.zeta_prime.real, r.zeta_prime.imag,
            r.omega_constant, r.noncancelled,
        ))
    return rows


def run_zeros(cfg: ExperimentConfig) -> dict:
    """Scan the quarter line up to t_max and evaluate every zero found."""
    chi = character_for(cfg)
    records = analytic.noncancelled_zeros(
        chi, cfg.t_max, cfg.noncancel_threshold, threads=cfg.threads
    )
    out = Path(cfg.out)
    path = write_csv(out / "zeros.csv", ZERO_CSV_HEADER,
                     _zero_rows(cfg.q, cfg.char, records))
    write_run_meta(out, cfg)
    return {"records": records, "csv": path}


def run_omega(cfg: ExperimentConfig) -> dict:
    """Analytic lower-bound constant vs the empirical x^(1/4) supremum.

    Always emits both numbers; a shortfall of the empirical side is flagged
    rather than treated as a failure, since the lower bound only bites at
    some arbitrarily large x.  Finding no usable zero is an error.
    """
    chi = character_for(cfg)
    records = analytic.noncancelled_zeros(
        chi, cfg.t_max, cfg.noncancel_threshold, threads=cfg.threads
    )
    usable = [r for r in records if r.simple and r.noncancelled]
    out = Path(cfg.out)
    write_csv(out / "zeros.csv", ZERO_CSV_HEADER, _zero_rows(cfg.q, cfg.char, records))

    cps = sieve.checkpoint_grid(cfg.max, cfg.extras)
    series = sieve.summatory_direct(
        "f", cps, chi=chi, char_id=cfg.char, threads=cfg.threads,
        track_extremes=(0.25,),
    )
    emp_sup, emp_at = series.extremes[0.25]
    analytic_const = analytic.omega_constant(usable[0]) if usable else float("nan")
    shortfall = (not usable) or emp_sup < analytic_const
    rows = [(
        cfg.q, cfg.char, cfg.max,
        usable[0].gamma if usable else None,
        analytic_const if usable else None,
        emp_sup, emp_at, shortfall,
    )]
    write_csv(
        out / "omega.csv",
        ("q", "char_id", "x_max", "first_zero_gamma", "analytic_constant",
         "empirical_sup_quarter", "empirical_argmax", "shortfall"),
        rows,
    )
    write_run_meta(out, cfg)
    if cfg.figures and usable:
        from .figures import omega_figure

        ratios = [m / x**0.25 for x, m in zip(series.checkpoints, series.sums)]
        omega_figure(series.checkpoints, np.abs(ratios), analytic_const,
                     out / "omega.png", q=cfg.q)
    if not usable:
        raise VerificationError(
            f"no non-cancelled simple zero found up to t_max={cfg.t_max}"
        )
    return {
        "records": records,
        "analytic_constant": analytic_const,
        "empirical_sup": emp_sup,
        "empirical_argmax": emp_at,
        "shortfall": shortfall,
        "series": series,
    }


def run_tail(cfg: ExperimentConfig) -> dict:
    """Measured decay of the truncation tail across doublings of M."""
    rows = []
    averages = {}
    figure_rows = []
    for sigma in cfg.sigmas:
        s = complex(sigma, cfg.tail_t)
        prev = None
        logs = []
        for k in range(cfg.tail_m_min_exp, cfg.tail_m_max_exp + 2):
            m = 2**k
            z = abs(analytic.z_m_tail(analytic.TailSpec(cfg.q, m, s, char_id=cfg.char)))
            ratio = math.log2(z / prev) if prev not in (None, 0.0) else None
            if ratio is not None:
                logs.append(ratio)
            rows.append((sigma, cfg.tail_t, m, z, ratio))
            figure_rows.append((sigma, m, z))
            prev = z
        averages[sigma] = sum(logs) / len(logs) if logs else float("nan")
    footers = [
        f"avg_log2_ratio_sigma_{sigma:g}={avg:.12g} expected={0.25 - sigma:.12g}"
        for sigma, avg in averages.items()
    ]
    out = Path(cfg.out)
    path = write_csv(out / "tail.csv",
                     ("sigma", "t", "m", "abs_tail", "log2_ratio"), rows, footers)
    write_run_meta(out, cfg)
    if cfg.figures:
        from .figures import tail_figure

        tail_figure(figure_rows, out / "tail.png", q=cfg.q)
    return {"averages": averages, "csv": path}


@dataclass
class RandomModelRun:
    """One reproducible Monte Carlo batch of the random multiplicative model."""

    seed: int
    x_max: int
    trials: int
    checkpoints: tuple[int, ...]
    values: np.ndarray  # (trials, checkpoints) partial sums
    quantiles: dict[float, np.ndarray]  # of |sum|/sqrt(x) across trials


_QUANTILES = (0.10, 0.25, 0.50, 0.75, 0.90)


def _random_model_values(
    seed: int, x_max: int, trials: int, checkpoints, *,
    all_ones: bool = False, threads: int = 1,
) -> np.ndarray:
    """Per-trial partial sums; signs multiplicative over squarefree support.

    Counter-based draws keyed by (derived trial seed, prime) make the result
    independent of chunking and parallel schedule.
    """
    squarefree = sieve.mobius_block(1, x_max + 1) != 0
    primes = [int(p) for p in sieve.primes_upto(x_max)]
    cp_idx = np.array(checkpoints, dtype=np.int64) - 1
    seeds = presplit_seeds(seed, trials)
    out = np.empty((trials, len(cp_idx)), dtype=np.int64)
    chunk = max(1, (1 << 26) // max(x_max, 1))
    spans = [(t0, min(t0 + chunk, trials)) for t0 in range(0, trials, chunk)]

    def work(span):
        t0, t1 = span
        f = np.ones((t1 - t0, x_max), dtype=np.int8)
        if not all_ones:
            sub = seeds[t0:t1]
            for p in primes:
                f[:, p - 1 :: p] *= prime_signs_matrix(sub, p)[:, None]
        f[:, ~squarefree] = 0
        block = np.empty((t1 - t0, len(cp_idx)), dtype=np.int64)
        for i in range(t1 - t0):
            block[i] = np.cumsum(f[i], dtype=np.int64)[cp_idx]
        return t0, block

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for t0, block in pool.map(work, spans):
                out[t0 : t0 + len(block)] = block
    else:
        for span in spans:
            t0, block = work(span)
            out[t0 : t0 + len(block)] = block
    return out


def run_random_model(cfg: ExperimentConfig) -> dict:
    """Monte Carlo partial sums under independent +-1 signs at the primes."""
    cps = sieve.checkpoint_grid(cfg.max, cfg.extras)
    values = _random_model_values(
        cfg.seed, cfg.max, cfg.trials, cps,
        all_ones=cfg.all_ones, threads=cfg.threads,
    )
    xs = np.array(cps, dtype=np.float64)
    ratios = np.abs(values) / np.sqrt(xs)[None, :]
    quantiles = {p: np.quantile(ratios, p, axis=0) for p in _QUANTILES}
    run = RandomModelRun(cfg.seed, cfg.max, cfg.trials, cps, values, quantiles)

    out = Path(cfg.out)
    trial_rows = [
        (t, x, int(values[t, j]), float(ratios[t, j]))
        for t in range(cfg.trials)
        for j, x in enumerate(cps)
    ]
    write_csv(out / "random_trials.csv", ("trial", "x", "m_f", "ratio_sqrt"), trial_rows)
    summary_rows = [
        (x, cfg.trials, *(float(quantiles[p][j]) for p in _QUANTILES))
        for j, x in enumerate(cps)
    ]
    write_csv(
        out / "random_summary.csv",
        ("x", "trials", "q10", "q25", "median", "q75", "q90"),
        summary_rows,
        [f"seed={cfg.seed}", f"all_ones={str(cfg.all_ones).lower()}"],
    )
    write_run_meta(out, cfg)
    if cfg.figures:
        from .figures import random_model_figure

        random_model_figure(cps, quantiles, out / "random.png", trials=cfg.trials)
    return {"run": run}


# ---------------------------------------------------------------------------
# verify


def _default_goldens_path() -> Path:
    return Path(resources.files("moblike") / "data" / "goldens.csv")


def _suite_goldens(cfg: ExperimentConfig, chars) -> tuple[str, str]:
    path = Path(cfg.goldens) if cfg.goldens else _default_goldens_path()
    if not path.is_file():
        return "FAIL", f"fixture not found: {path}"
    header, rows = read_csv_rows(path)
    if header != ["kind", "q", "char_id", "x", "sum"]:
        return "FAIL", f"unexpected fixture header {header}"
    for kind, q_s, cid_s, x_s, sum_s in rows:
        x, expected = int(x_s), int(sum_s)
        if kind == "mobius":
            got = sieve.summatory_direct("mobius", [x]).sums[0]
        elif kind in ("h", "abs_h"):
            got = sieve.summatory_direct(kind, [x], q=int(q_s)).sums[0]
        elif kind == "f":
            chs = arith.enumerate_real_characters(int(q_s))
            got = sieve.summatory_direct("f", [x], chi=chs[int(cid_s)]).sums[0]
        else:
            return "FAIL", f"unknown fixture kind {kind!r}"
        if got != expected:
            return "FAIL", f"{kind} q={q_s} x={x}: expected {expected}, got {got}"
    return "PASS", f"{len(rows)} golden values"


def convolution_mismatch(q: int, chi: arith.RealCharacter, n_max: int) -> int | None:
    """First n <= n_max violating sum_{d|n} chi(d) h(n/d) = f(n), else None.

    The divisor sum is grouped over the sparse support of h: for each m
    with h(m) != 0, every multiple n = m*d receives h(m) * chi(d).  Both
    sides are exact integers.
    """
    f_vals = sieve.sieve_segment("f", 1, n_max + 1, chi=chi).values.astype(np.int64)
    ns, hs, _, _ = sieve._h_tables(q, n_max)
    chi_at = np.array(chi.values, dtype=np.int64)[np.arange(n_max + 1) % q]
    conv = np.zeros(n_max + 1, dtype=np.int64)
    for m, hm in zip(ns.tolist(), hs.tolist()):
        conv[m::m] += hm * chi_at[1 : n_max // m + 1]
    diff = np.nonzero(conv[1:] != f_vals)[0]
    return int(diff[0] + 1) if len(diff) else None


def _suite_convolution(cfg: ExperimentConfig, chars) -> tuple[str, str]:
    if not chars:
        return "SKIP", "no real non-principal character"
    n_max = 20000
    for cid, chi in enumerate(chars):
        bad = convolution_mismatch(cfg.q, chi, n_max)
        if bad is not None:
            return "FAIL", f"char {cid}: first mismatch at n={bad}"
    return "PASS", f"{len(chars)} characters, n <= {n_max}"


def _suite_hyperbola(cfg: ExperimentConfig, chars) -> tuple[str, str]:
    if not chars:
        return "SKIP", "no real non-principal character"
    chi = chars[min(cfg.char, len(chars) - 1)]
    rng = np.random.default_rng(20260809)
    xs = sorted(set(int(v) for v in rng.integers(1, 10**5, size=40)))
    direct = sieve.summatory_direct("f", xs, chi=chi)
    checked = 0
    for x, dv in zip(direct.checkpoints, direct.sums):
        splits = [sieve.HyperbolaSplit.default(x)]
        d = int(rng.integers(1, x + 1))
        splits.append(sieve.HyperbolaSplit(x, d, -(-x // d)))
        for sp in splits:
            hv = sieve.summatory_hyperbola(chi, x, sp)
            checked += 1
            if hv != dv:
                return "FAIL", f"x={x} split=({sp.d_max},{sp.m_max}): {hv} != {dv}"
    return "PASS", f"{checked} (x, split) pairs"


def _suite_series(cfg: ExperimentConfig, chars) -> tuple[str, str]:
    if not chars:
        return "SKIP", "no real non-principal character"
    chi = chars[min(cfg.char, len(chars) - 1)]
    n_max = 200000
    f_vals = sieve.sieve_segment("f", 1, n_max + 1, chi=chi).values.astype(np.float64)
    ns = np.arange(1, n_max + 1, dtype=np.float64)
    for sigma in (1.5, 2.0, 2.5):
        truncated = float(np.dot(f_vals, ns**-sigma))
        target = analytic.f_series(chi, sigma).real
        tail_bound = n_max ** (1 - sigma) / (sigma - 1)
        if abs(truncated - target) > tail_bound + 1e-9:
            return "FAIL", f"s={sigma}: |diff|={abs(truncated - target):.3g} > {tail_bound:.3g}"
    return "PASS", "sigma in {1.5, 2, 2.5}"


def _reflection_grid() -> list[complex]:
    sigmas = np.linspace(-1.97, 2.91, 10)
    ts = np.linspace(-49.3, 49.7, 10)
    return [complex(sg, t) for sg in sigmas for t in ts]


def _suite_reflection(cfg: ExperimentConfig, chars) -> tuple[str, str]:
    worst = max(analytic.reflection_residual(s) for s in _reflection_grid())
    if worst > 1e-8:
        return "FAIL", f"worst residual {worst:.3g}"
    return "PASS", f"worst residual {worst:.3g} on 100 points"


def _suite_mellin(cfg: ExperimentConfig, chars) -> tuple[str, str]:
    if not chars:
        return "SKIP", "no real non-principal character"
    chi = chars[min(cfg.char, len(chars) - 1)]
    residual = analytic.mellin_check(chi, 2, 10**5)
    if residual > 1e-2:
        return "FAIL", f"residual {residual:.3g} at s=2, X=1e5"
    return "PASS", f"residual {residual:.3g} at s=2, X=1e5"


_VERIFY_SUITES = (
    ("goldens", _suite_goldens),
    ("convolution", _suite_convolution),
    ("hyperbola_direct", _suite_hyperbola),
    ("series_agreement", _suite_series),
    ("reflection", _suite_reflection),
    ("mellin", _suite_mellin),
)


def run_verify(cfg: ExperimentConfig, chars=None) -> dict:
    """Cross-module identity suites with machine-readable statuses.

    Character-dependent suites report SKIP when the modulus admits no real
    non-principal character (injectable for testing; every q >= 3 has one).
    """
    if chars is None:
        chars = arith.enumerate_real_characters(cfg.q)
    results = []
    for name, fn in _VERIFY_SUITES:
        try:
            status, detail = fn(cfg, chars)
        except Exception as exc:  # a crashed suite is a failure, not an abort
            status, detail = "FAIL", f"{type(exc).__name__}: {exc}"
        results.append((name, status, detail))
    out = Path(cfg.out)
    write_csv(out / "verify.csv", ("suite", "status", "detail"), results)
    write_run_meta(out, cfg)
    all_pass = all(status != "FAIL" for _, status, _ in results)
    return {"results": results, "all_pass": all_pass}


RUNNERS = {
    "growth": run_growth,
    "omega": run_omega,
    "zeros": run_zeros,
    "tail-decay": run_tail,
    "random-model": run_random_model,
    "verify": run_verify,
}
