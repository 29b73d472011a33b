"""Small hand-checkable models used by the tests, the README and the CLI demo."""

from __future__ import annotations

from .bayes import DiscreteBayesNet
from .dag import Dag

F, T = "false", "true"
BINARY = (F, T)


def _single_arc(a: list[float], b_given_not_a: list[float], b_given_a: list[float]) -> DiscreteBayesNet:
    return DiscreteBayesNet.from_tables(
        [("A", "B")],
        {"A": BINARY, "B": BINARY},
        {"A": ((), {(): a}), "B": (("A",), {(F,): b_given_not_a, (T,): b_given_a})},
    )


def disagreeing_authors() -> tuple[DiscreteBayesNet, DiscreteBayesNet]:
    """Two authors who agree on ``A -> B`` but not on the numbers.

    First: P(A)=.80, P(B|A)=.75, P(B|~A)=.10.
    Second: P(A)=.10, P(B|A)=.90, P(B|~A)=.60.
    Columns are listed as [P(false), P(true)].
    """
    first = _single_arc([0.2, 0.8], [0.9, 0.1], [0.25, 0.75])
    second = _single_arc([0.9, 0.1], [0.4, 0.6], [0.1, 0.9])
    return first, second


def reversal_demo_pair() -> tuple[Dag, Dag]:
    """Six-node first DAG and five-node second DAG that need one reversal
    and two deferred additions to fuse."""
    d1 = Dag("abcdef", [("a", "c"), ("b", "d"), ("e", "c"), ("c", "f"), ("d", "f")])
    d2 = Dag("abcde", [("a", "b"), ("a", "c"), ("d", "b"), ("b", "e")])
    return d1, d2
