#!/usr/bin/env python3
"""Smoke test for the xducer_py extension module.

Build the extension first:

    cargo build -p xducer-py

then run this script from anywhere inside the repository.
"""

import math
import pathlib
import shutil
import sys
import tempfile


def locate_extension():
    root = pathlib.Path(__file__).resolve().parent.parent
    candidates = []
    for profile in ("debug", "release"):
        for name in ("libxducer_py.so", "libxducer_py.dylib", "xducer_py.dll"):
            path = root / "target" / profile / name
            if path.exists():
                candidates.append(path)
    if not candidates:
        sys.exit("extension not found; run `cargo build -p xducer-py` first")
    return max(candidates, key=lambda p: p.stat().st_mtime)


def main():
    built = locate_extension()
    staging = pathlib.Path(tempfile.mkdtemp(prefix="xducer_py_"))
    shutil.copy2(built, staging / "xducer_py.so")
    sys.path.insert(0, str(staging))
    import xducer_py as xp

    checks = 0

    def check(label, value, expected, tol):
        nonlocal checks
        if abs(value - expected) > tol:
            sys.exit(f"FAIL {label}: {value} not within {tol} of {expected}")
        checks += 1
        print(f"  ok {label} = {value:.6g}")

    rates = xp.Rates()
    heating = xp.Heating()

    gamma = xp.scattering_rate(826e3, 45.0, 800e6)
    check("gamma_om", gamma, 153.5e3, 1e3)
    check("eta_om", xp.readout_efficiency(gamma, 20e3, 500e-9), 0.371, 0.005)
    check("n_added", heating.added_noise(45.0, 500e-9), 0.5, 1e-9)

    eta_pe = xp.swap_efficiency(rates)
    if not 0.93 <= eta_pe <= 0.99:
        sys.exit(f"FAIL eta_pe = {eta_pe} outside [0.93, 0.99]")
    checks += 1
    print(f"  ok eta_pe = {eta_pe:.4f}")

    budget = xp.efficiency_budget(0.95, 0.37, rates)
    check("eta_total", budget["eta_total"], 0.0187, 0.0005)
    check("single_rate", budget["single_rate"], 187.0, 5.0)
    check("coincidence_rate", budget["coincidence_rate"], 3.5, 0.2)

    check("kappa_TLS", xp.mechanical_loss_budget(0.02, 300e3, 4e3), 9.92e3, 1e-6)
    check(
        "kappa_m",
        xp.mechanical_loss_budget(0.02, 300e3, 4e3, kappa_rad=2.3e3),
        12.22e3,
        1e-6,
    )

    zeta_q, dkq = xp.qubit_loss_contribution(
        0.25e-15, 70e-15, xp.dielectric_loss_rate(5e9, 1.7e-5)
    )
    check("zeta_q", zeta_q, 3.6e-3, 0.1e-3)
    check("delta_kappa_q", dkq, 304.0, 7.0)

    n_o, tau, eta_om, n_added = xp.optimize_pulse(rates, heating, 0.5)
    if eta_om < 0.37 or n_added > 0.5 + 1e-6:
        sys.exit(f"FAIL optimize_pulse: eta_om={eta_om}, n_added={n_added}")
    checks += 1
    print(f"  ok optimize_pulse -> n_o={n_o:.1f}, tau={tau:.3e}, eta_om={eta_om:.4f}")

    # error paths surface as ValueError
    try:
        xp.scattering_rate(826e3, 1.0, 0.0)
    except ValueError:
        checks += 1
        print("  ok zero optical linewidth raises ValueError")
    else:
        sys.exit("FAIL: zero kappa_o did not raise")

    assert math.isclose(rates.kappa_o, 800e6)
    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
