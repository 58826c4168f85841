import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

from x3dui.runtime import Scene, initial_state  # noqa: E402
from x3dui.toolchain import generate_corpus  # noqa: E402
from x3dui.widgets import compile_tree  # noqa: E402

THREE_FRAMES = """
<Display>
  <Frame name="editor" title="Editor">
    <ControlButton type="MINIMIZE"/>
    <ControlButton type="MAXIMIZE"/>
    <ControlButton type="CLOSE"/>
    <TextField name="field" width="80" maxLength="12"/>
    <TextButton name="ok" text="OK"/>
    <ToggleButton name="bold" width="20" height="20"/>
    <CheckBox name="check" text="wrap"/>
  </Frame>
  <Frame name="options" title="Options" layout="box" orientation="column">
    <ControlButton type="MINIMIZE"/>
    <ControlButton type="CLOSE"/>
    <RadioButtonGroup name="sizes">
      <RadioButton name="small" text="small" checked="true"/>
      <RadioButton name="medium" text="medium"/>
      <RadioButton name="large" text="large"/>
    </RadioButtonGroup>
    <ComboBox name="font" items="serif|sans|mono" width="70"/>
    <HorizontalSlider name="zoom" min="0" max="10" value="5" intervals="5" discrete="true" width="120"/>
  </Frame>
  <Frame name="tabs" title="Tabs" resizable="false">
    <ControlButton type="CLOSE"/>
    <TabPanel name="panel">
      <Tab title="one"><TextButton name="b1" text="first"/></Tab>
      <Tab title="two"><TextButton name="b2" text="second"/></Tab>
      <Tab title="three"><Label text="third"/></Tab>
    </TabPanel>
  </Frame>
</Display>
"""


def build(source):
    tree, report = compile_tree(source)
    assert report.ok, str(report)
    return tree


@pytest.fixture
def three_frames():
    tree = build(THREE_FRAMES)
    scene = Scene(tree)
    return tree, scene, initial_state(scene)


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    generate_corpus(root, seed=0)
    return root


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
