"""Productive cut elimination: identity wrapping and a stalled cut."""
from mumall.cutelim import BudgetExhausted, emit_prefix, run_to_depth
from mumall.fixtures import fixture
from mumall.proof import export_dot, tree_to_graph, unfold_to_depth
from mumall.reduce import count_cuts


def main():
    d = fixture("cut_loop")
    state, events = run_to_depth(d, 6, keep_source_cuts=True)
    print("identity wrap, source cuts kept:",
          emit_prefix(state, 6) == unfold_to_depth(d, 6), f"({len(events)} events)")

    state, events = run_to_depth(d, 6)
    p = emit_prefix(state, 6)
    print("full elimination: cuts left", count_cuts(p), f"({len(events)} events)")
    kinds = {}
    for ev in events:
        kinds[ev.kind] = kinds.get(ev.kind, 0) + 1
    print("event kinds:", kinds)

    try:
        run_to_depth(fixture("left"), 4, budget=500)
    except BudgetExhausted as exc:
        print("mu/nu cut: budget exhausted, deepest multicut at", max(exc.depth_log))

    small, _ = run_to_depth(fixture("cut_id_id"), 4)
    print(export_dot(tree_to_graph(emit_prefix(small, 4))))


if __name__ == "__main__":
    main()
