"""Regenerates the synthetic benchmark corpus.

Each case directory gets model.ode, data.csv (25 significant digits from a
high-precision Taylor integration) and truth.json.  Run from anywhere:

    python3 corpus/generate.py
"""

import json
import pathlib

import mpmath as mp

mp.mp.dps = 40
DIGITS = 25
ROOT = pathlib.Path(__file__).resolve().parent


def grid(t0, t1, n):
    return [mp.mpf(t0) + (mp.mpf(t1) - mp.mpf(t0)) * k / (n - 1) for k in range(n)]


CASES = [
    {
        "name": "toy",
        "model": "states: x\nparams: mu\ndynamics:\n  x' = -mu*x\noutputs:\n  y = x^2 + x\n",
        "params": {"mu": "0.5"},
        "initial": {"x": "1"},
        "rhs": lambda p, x: [-p["mu"] * x[0]],
        "outputs": {"y": lambda x: x[0] ** 2 + x[0]},
        "times": grid(0, 1, 11),
    },
    {
        "name": "rt_inflow",
        "model": "states: x\nparams: a, b\ndynamics:\n  x' = a - b*x\noutputs:\n  y = x\n",
        "params": {"a": "1.2", "b": "0.7"},
        "initial": {"x": "0.3"},
        "rhs": lambda p, x: [p["a"] - p["b"] * x[0]],
        "outputs": {"y": lambda x: x[0]},
        "times": grid(0, 1, 11),
    },
    {
        "name": "rt_logistic",
        "model": "states: x\nparams: r, k\ndynamics:\n  x' = r*x - k*x^2\noutputs:\n  y = x\n",
        "params": {"r": "1.5", "k": "0.8"},
        "initial": {"x": "0.2"},
        "rhs": lambda p, x: [p["r"] * x[0] - p["k"] * x[0] ** 2],
        "outputs": {"y": lambda x: x[0]},
        "times": grid(0, 1, 11),
    },
    {
        "name": "rt_cascade",
        "model": (
            "states: u, v\nparams: a, b\ndynamics:\n  u' = -a*u + v\n  v' = -b*v\n"
            "outputs:\n  y1 = u\n  y2 = v\n"
        ),
        "params": {"a": "0.9", "b": "0.4"},
        "initial": {"u": "1", "v": "0.5"},
        "rhs": lambda p, x: [-p["a"] * x[0] + x[1], -p["b"] * x[1]],
        "outputs": {"y1": lambda x: x[0], "y2": lambda x: x[1]},
        "times": grid(0, 1, 11),
    },
    {
        "name": "pk_two_compartment",
        "model": (
            "# central compartment c observed, peripheral p starts empty\n"
            "states: c, p\nparams: k10, k12, k21\n"
            "dynamics:\n  c' = -(k10 + k12)*c + k21*p\n  p' = k12*c - k21*p\n"
            "outputs:\n  y = c\nknown:\n  p(0) = 0\n"
        ),
        "params": {"k10": "0.3", "k12": "0.5", "k21": "0.2"},
        "initial": {"c": "2", "p": "0"},
        "rhs": lambda p, x: [-(p["k10"] + p["k12"]) * x[0] + p["k21"] * x[1], p["k12"] * x[0] - p["k21"] * x[1]],
        "outputs": {"y": lambda x: x[0]},
        "times": grid(0, 2, 21),
    },
    {
        "name": "crn_dimerization",
        "model": (
            "# 2A -> B at rate k1, B decays at rate k2\n"
            "states: a, b\nparams: k1, k2\n"
            "dynamics:\n  a' = -k1*a^2\n  b' = k1*a^2 - k2*b\n"
            "outputs:\n  ya = a\n  yb = b\n"
        ),
        "params": {"k1": "0.4", "k2": "0.3"},
        "initial": {"a": "1", "b": "0.1"},
        "rhs": lambda p, x: [-p["k1"] * x[0] ** 2, p["k1"] * x[0] ** 2 - p["k2"] * x[1]],
        "outputs": {"ya": lambda x: x[0], "yb": lambda x: x[1]},
        "times": grid(0, 1, 11),
    },
]


def fmt(v):
    return mp.nstr(v, DIGITS, strip_zeros=False, min_fixed=-30, max_fixed=30)


def main():
    for case in CASES:
        d = ROOT / case["name"]
        d.mkdir(exist_ok=True)
        (d / "model.ode").write_text(case["model"])
        params = {k: mp.mpf(v) for k, v in case["params"].items()}
        x0 = [mp.mpf(v) for v in case["initial"].values()]
        t0 = case["times"][0]
        sol = mp.odefun(lambda t, x: case["rhs"](params, x if isinstance(x, list) else [x]), t0, x0)
        names = list(case["outputs"])
        lines = ["t," + ",".join(names)]
        for t in case["times"]:
            x = sol(t)
            x = list(x) if isinstance(x, (list, tuple)) else [x]
            row = [mp.nstr(t, 6)] + [fmt(case["outputs"][n](x)) for n in names]
            lines.append(",".join(row))
        (d / "data.csv").write_text("\n".join(lines) + "\n")
        truth = {
            "params": {k: float(v) for k, v in case["params"].items()},
            "initial": {k: float(v) for k, v in case["initial"].items()},
        }
        (d / "truth.json").write_text(json.dumps(truth, indent=2) + "\n")


if __name__ == "__main__":
    main()
