import harvestkit


def test_public_names_resolve():
    missing = [name for name in harvestkit.__all__ if not hasattr(harvestkit, name)]
    assert missing == []


def test_unused_helpers_not_exported():
    assert 'get_logger' not in harvestkit.__all__
    assert not hasattr(harvestkit, 'get_logger')


def test_docstring_names_subsonic_branch():
    assert '次聲速' in harvestkit.__doc__
    assert '超光速' not in harvestkit.__doc__
