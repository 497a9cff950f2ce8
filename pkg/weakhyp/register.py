import os

scenario_list = []
scenario_paths = {}

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'scenarios')


def register(
    id,
    filename,
    description=''
):
    assert id not in scenario_list, 'scenario {} registered twice'.format(id)
    path = os.path.join(SCENARIO_DIR, filename)
    assert os.path.isfile(path), 'missing scenario file {}'.format(path)

    scenario_paths[id] = (path, description)

    # Add the scenario to the set
    scenario_list.append(id)


def resolve(name_or_path):
    """
    path of a bundled scenario given its id, or the argument itself when it is not a registered id
    """
    if name_or_path in scenario_paths:
        return scenario_paths[name_or_path][0]
    return name_or_path
