"""Progressivity verdicts, witnesses and counterexamples on the fixtures."""
from mumall.fixtures import FIXTURES, fixture
from mumall.progress import brute_force_progressivity, check_progressivity, verdict_summary


def main():
    for name in FIXTURES:
        g = fixture(name)
        v = check_progressivity(g)
        o = brute_force_progressivity(g)
        agree = "agrees" if o.progressing == v.progressing else "DISAGREES"
        print(f"{name:10s} {verdict_summary(v)}  (oracle {agree})")


if __name__ == "__main__":
    main()
