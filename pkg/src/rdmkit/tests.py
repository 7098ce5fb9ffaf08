from fractions import Fraction

from .factorize import expand_and_compare, solve_minfac
from .fixtures import load
from .interventions import solve_resilience, solve_responsibility

__all__ = ("test",)


def _test_mcdormand():
    q, inst = load("qa_triangle", "mcdormand")

    resilience = solve_resilience(q, inst)
    assert resilience.value == 1
    assert resilience.deleted <= {"Oscar:1", "Spouse:1"}

    assert solve_responsibility(q, inst, "Oscar:1").responsibility == 1
    assert solve_responsibility(q, inst, "ActsIn:1").responsibility == Fraction(1, 2)

    minfac = solve_minfac(q, inst)
    assert minfac.length == 6
    assert expand_and_compare(minfac.expression, minfac.dnf)

    q, inst = load("qa_triangle", "mcdormand_bag")
    assert solve_resilience(q, inst, "bag").deleted == {"Spouse:1"}


def test():
    """Basic integration test of rdmkit to ensure that the library is functioning correctly."""
    _test_mcdormand()
    print("Success!")
