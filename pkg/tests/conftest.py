import pytest

from csmkit.modelfile import parse_model

from helpers import fixture


@pytest.fixture(scope="session")
def design_doc():
    return parse_model(fixture("design-original/system.csm"))


@pytest.fixture(scope="session")
def design_system(design_doc):
    return design_doc.system()


@pytest.fixture(scope="session")
def repaired_system():
    return parse_model(fixture("design-repaired/system.csm")).system()


@pytest.fixture(scope="session")
def modules_doc():
    return parse_model(fixture("design-original/modules.csm"))


@pytest.fixture(scope="session")
def m1():
    return parse_model(fixture("m1/m1.csm")).csms["M1"]


@pytest.fixture(scope="session")
def m1_system():
    return parse_model(fixture("m1/m1.csm")).system()
