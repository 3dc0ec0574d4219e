"""Coverings of reduction paths on the four cut cases and the IC checks."""
from mumall.cutelim import BudgetExhausted, normalize
from mumall.fixtures import fixture
from mumall.icsets import check_external_progressivity, covering, verify_ic_candidate


def events_of(g, strategy):
    out = []
    try:
        for ev, _ in normalize(g, budget=600, auto_wrap=False, strategy=strategy):
            out.append(ev)
    except BudgetExhausted:
        pass
    return out


def main():
    for case in (1, 2, 3, 4):
        g = fixture(f"ic_case{case}")
        for strategy in ("first", "last", "alternate"):
            cov = covering(g, events_of(g, strategy))
            rep = verify_ic_candidate(g, cov.nodes, 20)
            print(f"case {case} {strategy:9s} covering {sorted(cov.nodes)}  "
                  f"IC: {'yes' if rep.ok else 'no'}")
        print(f"case {case} externally progressing:",
              check_external_progressivity(g).externally_progressing)
    g = fixture("ic_case1")
    print("case 1, left loop alone:", verify_ic_candidate(g, {"r", "l"}).to_json()["status"])


if __name__ == "__main__":
    main()
