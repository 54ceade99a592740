def test_import():
    import lsfm_imaging  # noqa
