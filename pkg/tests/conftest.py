from __future__ import annotations

from pathlib import Path

import pytest

from fdual.abelian import ElementSet, GroupSpec, PairingMatrix

REPO_ROOT = Path(__file__).resolve().parent.parent

ORDER64_ORDERS = (2, 2, 4, 4)
ORDER64_S_COORDS = [
    (0, 0, 0, 0),
    (0, 0, 0, 1),
    (0, 0, 0, 2),
    (0, 0, 1, 0),
    (0, 0, 2, 1),
    (0, 1, 0, 0),
    (1, 0, 0, 0),
    (1, 1, 3, 2),
]
ORDER64_PAIRING_ROWS = ((2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))


@pytest.fixture(scope="session")
def theorem21_path() -> Path:
    path = REPO_ROOT / "instances" / "theorem21.json"
    assert path.exists(), "shipped instance file is missing"
    return path


@pytest.fixture(scope="session")
def order64_spec() -> GroupSpec:
    return GroupSpec(ORDER64_ORDERS)


@pytest.fixture(scope="session")
def order64_pairing(order64_spec) -> PairingMatrix:
    return PairingMatrix(order64_spec, ORDER64_PAIRING_ROWS)


@pytest.fixture(scope="session")
def order64_set(order64_spec) -> ElementSet:
    return ElementSet.from_coords(order64_spec, ORDER64_S_COORDS)
