from textwrap import dedent


class RDMWarning(Warning):
    """Base warning for ``rdmkit``."""


class DuplicateRowWarning(RDMWarning):
    """Warning for duplicate value rows collapsed while loading a relation."""

    def __init__(self, relation, values, rows, semantics):
        action = "kept first occurrence" if semantics == "set" else "multiplicities summed"
        message = dedent(
            f"""
            Relation "{relation}" repeats values {tuple(values)} on rows {', '.join(map(str, rows))}
            ({semantics} semantics: {action})."""
        )
        super().__init__(message)


class MultiplicityIgnoredWarning(RDMWarning):
    """Warning for a ``_mult`` column read under set semantics."""

    def __init__(self, relation):
        super().__init__(f'Relation "{relation}" has a _mult column; ignored under set semantics')


class DegenerateTargetWarning(RDMWarning):
    """Warning for responsibility targets that occur in no witness."""

    def __init__(self, target):
        super().__init__(
            f"Tuple {target} occurs in no witness; its responsibility is reported as 0"
        )
