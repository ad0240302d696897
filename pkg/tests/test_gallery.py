import pytest

from kfredholm import gallery
from kfredholm.fredholm import fredholm_check_regular


def test_gallery_contents():
    names = {g.name for g in gallery.GALLERY}
    assert len(gallery.GALLERY) >= 6
    assert {"shift-1", "shift-2", "shift-3", "diagonal-n", "diagonal-decay", "finite-rank-perturbed-shift"} <= names
    for g in gallery.GALLERY:
        doc = g.to_json()
        assert "index" in doc["expected"] and doc["provenance"]


@pytest.mark.parametrize("entry", gallery.GALLERY, ids=lambda g: g.name)
@pytest.mark.parametrize("levels", [(16, 32), (24, 48, 96)])
def test_expected_verdicts_are_recomputed(entry, levels):
    rep = fredholm_check_regular(entry.tower(levels))
    assert rep.is_fredholm == entry.is_fredholm
    assert rep.index == entry.index
    assert not rep.disagreements
    assert rep.companion.index == entry.index


def test_unbounded_flags_match_symbols():
    for g in gallery.GALLERY:
        assert g.tower().unbounded == g.unbounded
