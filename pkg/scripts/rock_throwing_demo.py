#!/usr/bin/env python3
"""Walk through the rock-throwing story: checking, semi-inference and inference.

Suzy (ST) and Billy (BT) both throw; Suzy's rock hits first (SH), so Billy's
(BH) misses, and the bottle shatters (BS).
"""
import argparse

from hpcause import Strategy, check_cause, compute_responsibility, infer_why, parse_expr, rock_throwing
from hpcause.model import evaluate, format_assignment

CONTEXT = {"ST_exo": True, "BT_exo": True}


def show_check(model, effect, cause, strategy):
    ans = check_cause(model, CONTEXT, effect, cause, strategy)
    label = format_assignment(cause)
    print(f"  {label:<10} {strategy.value:<7} AC1={ans.ac1!s:<5} AC2={ans.ac2!s:<5} AC3={ans.ac3!s:<5}", end="")
    if ans.distance is not None:
        print(f" distance={ans.distance} minimal part={format_assignment(ans.x_min)}", end="")
    print()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--strategies", default="sat,satopt,ilp,maxsat,brute")
    args = ap.parse_args(argv)
    strategies = [Strategy(s) for s in args.strategies.split(",")]

    model = rock_throwing()
    effect = parse_expr("BS")
    actual = evaluate(model, CONTEXT)
    print("actual world:", format_assignment([(v, actual[v]) for v in model.endogenous]))

    print("\nchecking candidate causes of BS=1")
    for cause in ([("ST", True)], [("BT", True)], [("ST", True), ("BT", True)]):
        for strategy in strategies:
            show_check(model, effect, cause, strategy)

    print("\ndegree of responsibility")
    for cause in ([("ST", True)], [("SH", True)]):
        print(f"  {format_assignment(cause)}: {compute_responsibility(model, CONTEXT, effect, cause)}")

    ans = infer_why(model, CONTEXT, effect)
    print("\nwhy did the bottle shatter?")
    print(f"  cause {format_assignment(ans.x_min)}, contingency {format_assignment(ans.w)}, "
          f"responsibility {ans.responsibility}")


if __name__ == "__main__":
    main()
