"""Walk through a few Riemann fans of the hysteretic spacing model.

Each initial pair of car states is resolved into an ordered fan of elementary
waves; the script prints the fan and cross-checks every shock against the
viscous-profile oracle.
"""

from hystlwr import (HState, default_family, solve_riemann, velocity,
                     viscous_profile_check)


def describe(fam, left, right):
    vl = velocity(fam, left)
    vr = velocity(fam, right)
    print(f"left  (u={left.u:.4f}, h={left.h:.4f})  v={vl:.4f}")
    print(f"right (u={right.u:.4f}, h={right.h:.4f})  v={vr:.4f}")
    fan = solve_riemann(fam, left, right)
    if not fan.waves:
        print("  identical states, empty fan")
        return
    for w in fan.waves:
        lo, hi = w.speed_range
        if lo == hi:
            print(f"  {w.kind:4s} speed {lo:+.4f}", end="")
        else:
            print(f"  {w.kind:4s} speeds [{lo:+.4f}, {hi:+.4f}]", end="")
        print(f"  -> (u={w.right.u:.4f}, h={w.right.h:.4f})")
        if w.kind not in ("ScR", "AR"):
            rep = viscous_profile_check(fam, w)
            tag = "connects" if rep.connected and rep.monotone else "FAILS"
            print(f"        viscous profile {tag}")


def main():
    fam = default_family()
    cases = [
        ("braking into a slow scanning state",
         HState(3.0, 2.0), HState(2.221811012336139, 2.043)),
        ("deep braking onto the deceleration curve",
         HState(3.0, 2.0), HState(1.2, 1.2)),
        ("acceleration out of a jam",
         HState(1.3, 1.3), HState(3.2, fam.hA(3.2))),
        ("pure rarefaction on one scanning curve",
         HState(2.1, 2.0), HState(2.9, 2.0)),
    ]
    for title, left, right in cases:
        print(f"== {title} ==")
        describe(fam, left, right)
        print()


if __name__ == "__main__":
    main()
