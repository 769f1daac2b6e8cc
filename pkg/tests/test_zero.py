"""Contains an empty test."""


def test_zero() -> None:
    """Empty test.

    Exists so that the shared fixtures are loaded even when every other test
    is deselected.
    """
