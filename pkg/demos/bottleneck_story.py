"""Front-tracking story of a temporary slowdown.

A platoon of cars at uniform spacing meets a slow stretch between car
positions -1 and 0.  The braking fan and the acceleration fan interact once;
after that single event the picture is frozen: a standing hysteresis wave
marks where cars once braked, even though every car is back to speed.
"""

from hystlwr import HState, default_family, sample, track, velocity
from hystlwr.scenarios import state_at_velocity


def main():
    fam = default_family()
    background = HState(2.0, 1.9)
    slow = state_at_velocity(fam, 2.0, 0.2)
    sol = track(fam, [-1.0, 0.0], [background, slow, background], 30.0)

    print(f"fronts after init: {len(sol.initial.fronts)}")
    for ev in sol.events:
        inc = "+".join(w.kind for w in ev.incoming)
        out = "+".join(w.kind for w in ev.outgoing)
        print(f"event {ev.number} at t={ev.t:.5f}, x={ev.x:.5f}: "
              f"{inc} -> {out}")

    for t in (1.0, 5.0, 30.0):
        xs = [-3.0, -1.5, -0.5, 0.5]
        states = sample(sol, t, xs)
        line = "  ".join(f"(u,v)({x:+.1f})=({s.u:.3f},{velocity(fam, s):.3f})"
                         for x, s in zip(xs, states))
        print(f"t={t:5.1f}  {line}")
    print("by t=30 every car is back at full speed, but the cars that braked")
    print("cruise at a wider spacing: the standing wave at x=0 records the")
    print("hysteresis for good")


if __name__ == "__main__":
    main()
