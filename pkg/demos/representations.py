"""The three faces of the sphere-plane free energy.

The Matsubara sum, the zero-temperature frequency integral, and the
Boltzmann-weighted real-frequency integral are evaluated independently and
must satisfy F = E_0 + F_T.  The closed-form limits bracket them at low
and high temperature.
"""

import math

from casphere import (Geometry, FieldSpec, matsubara_free_energy,
                      vacuum_energy, thermal_part, low_t_thermal, high_t_f0)


def main():
    geom = Geometry(R=1.0, d=0.5)
    spec = FieldSpec()  # scalar, Dirichlet on both surfaces
    T = 1.0

    f = matsubara_free_energy(geom, spec, T)
    e0 = vacuum_energy(geom, spec)
    ft = thermal_part(geom, spec, T)
    print(f"R={geom.R}, d={geom.d}, T={T}, scalar Dirichlet/Dirichlet")
    print(f"  Matsubara free energy  F   = {f.value:12.6f}  "
          f"(n_max={f.diagnostics['n_max_used']}, l_max={f.diagnostics['l_max_used']})")
    print(f"  vacuum energy          E_0 = {e0.value:12.6f}")
    print(f"  thermal part           F_T = {ft.value:12.6f}")
    print(f"  identity residual (F - E_0 - F_T)/|F_T| = "
          f"{(f.value - e0.value - ft.value)/abs(ft.value):+.2e}")

    print("\nlow-temperature bracket (T = 0.01):")
    Tlow = 1e-2
    num = thermal_part(Geometry(1.0, 1.0), spec, Tlow)
    closed = low_t_thermal(Geometry(1.0, 1.0), spec, Tlow)
    print(f"  numeric F_T        = {num.value:.6e}")
    print(f"  closed form T^2    = {closed.value:.6e}")

    print("\nhigh-temperature factorization:")
    f0 = high_t_f0(geom, spec)
    Thi = 40.0
    fhi = matsubara_free_energy(geom, spec, Thi)
    print(f"  F_0(eps={geom.eps}) = {f0:.6f}")
    print(f"  F(T={Thi})/ (T F_0) = {fhi.value/(Thi*f0):.6f}  "
          "(non-zero modes are exponentially dead)")

    print("\nthermal force (negative = attraction strengthened):")
    from casphere import force
    res = force(Geometry(1.0, 0.1), spec, 1.0, target="thermal_part")
    print(f"  R=1, eps=0.1: -dF_T/dd = {res.value:+.5f} "
          f"+- {res.error_estimate:.1e}")


if __name__ == "__main__":
    main()
