"""Figure presets: each returns the result tables for one figure of the study.

Sweep grids are round numbers (task sizes 0.5 to 3 Gbit in 0.5 Gbit steps).
"""

from thzmec.channel import WINDOWS
from thzmec.harness.output import Table
from thzmec.harness.runner import monte_carlo
from thzmec.harness.scenario import Scenario

GBIT = 1e9
L_GRID = tuple(GBIT * x for x in (0.5, 1.0, 1.5, 2.0, 2.5, 3.0))
THZ_L_GRID = tuple(GBIT * x for x in (1.0, 2.0, 3.0))
MMWAVE_L_GRID = (5e6, 10e6, 15e6)
BETA_GRID = (0.1, 0.2, 0.3, 0.4)
ANTENNA_GRID = (2, 4, 8, 16)
T_GRID = tuple(round(0.05 * i, 2) for i in range(1, 11))
UNEVEN_L = ((1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (1.0, 3.0), (3.0, 1.0))  # (L_edge, L_center) Gbit

ENERGY_COLS = ["energy_J", "std_energy_J", "infeasible_rate"]
CEE_COLS = ["cee_bpJHz", "std_cee_bpJHz", "cee_solved_bpJHz", "infeasible_rate"]


def _mc(scenario, workers):
    cols, rows = monte_carlo(scenario, workers)
    return [dict(zip(cols, r)) for r in rows]


def _sweep(name, base, label, values, changes, metrics, workers, preset):
    """Long-format table: one row per (users, sweep value)."""
    rows = []
    for v in values:
        for rec in _mc(base.replace(**changes(v)), workers):
            rows.append((rec["users"], v) + tuple(rec[m] for m in metrics))
    return Table(name, ["users", label] + list(metrics), rows, base, preset, series=label)


def _bits(v):
    return {"bits_edge": v, "bits_center": v}


def fig3(base, workers=None):
    return [
        _sweep(f"fig3_{m}", base.replace(mode=m, objective="energy_min"), "bits_per_user_bits", L_GRID, _bits,
               ENERGY_COLS, workers, "fig3")
        for m in ("full", "partial", "none")
    ]


def fig4(base, workers=None):
    noma = _mc(base.replace(mode="full", objective="energy_min"), workers)
    oma = _mc(base.replace(mode="oma", objective="energy_min"), workers)
    rows = [
        (a["users"], a["energy_J"], b["energy_J"], a["std_energy_J"], b["std_energy_J"])
        for a, b in zip(noma, oma)
    ]
    cols = ["users", "energy_noma_J", "energy_oma_J", "std_energy_noma_J", "std_energy_oma_J"]
    return [Table("fig4", cols, rows, base, "fig4")]


def fig5(base, workers=None):
    thz = base.replace(mode="full", objective="energy_min")
    mmw = base.replace(mode="mmwave", objective="energy_min", window="mmwave")
    a = _mc(thz.replace(trials=1), workers)
    b = _mc(mmw.replace(trials=1), workers)
    caps = Table(
        "fig5a_max_bits",
        ["users", "max_bits_thz_bits", "max_bits_mmwave_bits"],
        [(x["users"], x["max_bits_per_user_bits"], y["max_bits_per_user_bits"]) for x, y in zip(a, b)],
        base,
        "fig5",
    )
    return [
        caps,
        _sweep("fig5b_energy_thz", thz, "bits_per_user_bits", THZ_L_GRID, _bits, ENERGY_COLS, workers, "fig5"),
        _sweep("fig5c_energy_mmwave", mmw, "bits_per_user_bits", MMWAVE_L_GRID, _bits, ENERGY_COLS, workers,
               "fig5"),
    ]


def fig6(base, workers=None):
    base = base.replace(mode="full", objective="energy_min")
    rows = []
    for le, lc in UNEVEN_L:
        for rec in _mc(base.replace(bits_edge=le * GBIT, bits_center=lc * GBIT), workers):
            rows.append((rec["users"], le * GBIT, lc * GBIT) + tuple(rec[m] for m in ENERGY_COLS))
    cols = ["users", "bits_edge_bits", "bits_center_bits"] + ENERGY_COLS
    return [Table("fig6", cols, rows, base, "fig6", series="bits_edge_bits")]


def fig7(base, workers=None):
    base = base.replace(mode="full", objective="energy_min")
    caps = _sweep("fig7a_max_bits", base.replace(trials=1), "beta_edge", BETA_GRID,
                  lambda b: {"beta_edge": b}, ["max_bits_per_user_bits"], workers, "fig7")
    energy = _sweep("fig7b_energy", base, "beta_edge", BETA_GRID, lambda b: {"beta_edge": b}, ENERGY_COLS,
                    workers, "fig7")
    return [caps, energy]


def fig8(base, workers=None):
    base = base.replace(mode="full", objective="energy_min")
    names = sorted(WINDOWS)
    freq = {n: WINDOWS[n].center_frequency for n in names}

    def by_window(f):
        return {"window": next(n for n in names if freq[n] == f)}

    grid = tuple(freq[n] for n in names)
    caps = _sweep("fig8a_max_bits", base.replace(trials=1), "center_frequency_Hz", grid, by_window,
                  ["max_bits_per_user_bits"], workers, "fig8")
    energy = _sweep("fig8b_energy", base, "center_frequency_Hz", grid, by_window, ENERGY_COLS, workers, "fig8")
    return [caps, energy]


def fig9(base, workers=None):
    base = base.replace(mode="full", objective="energy_min")
    return [_sweep("fig9", base, "n_antennas", ANTENNA_GRID, lambda n: {"n_antennas": n}, ENERGY_COLS, workers,
                   "fig9")]


def fig10(base, workers=None):
    return [
        _sweep(f"fig10_{m}", base.replace(mode=m, objective="cee_max"), "bits_per_user_bits", L_GRID, _bits,
               CEE_COLS, workers, "fig10")
        for m in ("full", "partial", "none")
    ]


def fig11(base, workers=None):
    base = base.replace(mode="full", objective="cee_max")
    return [_sweep("fig11", base, "block_s", T_GRID, lambda t: {"block_s": t}, CEE_COLS, workers, "fig11")]


def fig12(base, workers=None):
    base = base.replace(mode="full", objective="cee_max")
    return [_sweep("fig12", base, "n_antennas", ANTENNA_GRID, lambda n: {"n_antennas": n}, CEE_COLS, workers,
                   "fig12")]


PRESETS = {
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
    "fig10": fig10,
    "fig11": fig11,
    "fig12": fig12,
}


def run_preset(name, base=None, workers=None):
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return PRESETS[name](base or Scenario(), workers)
