# YAML Input/Output
"""YAML file format input/output.

JSON documents are valid YAML, so configuration and code definition files
in either format are read here.
"""

import yaml

from syndromest.io import libsyn


def load_yaml(path, enums=None):
    """Load a YAML or JSON file with support for multiple documents and Enums.

    Args:
        path (str): Path to file.
        enums (dict): Dictionary mapping Enum names to Enum classes; defaults
            to None. If a key or value in the file matches an Enum name
            followed by a period, the corresponding Enum will be used.

    Returns:
        List[dict]: Sequence of parsed dictionaries for each document within
        the file.

    Raises:
        :class:`libsyn.ConfigError`: if the file cannot be parsed or an Enum
        member is not found.

    """
    def parse_enum_val(val):
        if isinstance(val, str):
            val_split = val.split(".")
            if len(val_split) == 2 and val_split[0] in enums:
                # replace with the corresponding Enum class
                try:
                    val = enums[val_split[0]][val_split[1].upper()]
                except KeyError:
                    raise libsyn.ConfigError(
                        "{} is not a member of {}".format(
                            val_split[1], val_split[0]))
        return val

    def parse_enum(d):
        # recursively parse Enum keys and values within nested dictionaries
        out = {}
        for key, val in d.items():
            if isinstance(val, dict):
                val = parse_enum(val)
            elif isinstance(val, (list, tuple)):
                val = [parse_enum_val(v) for v in val]
            else:
                val = parse_enum_val(val)
            out[parse_enum_val(key)] = val
        return out

    try:
        with open(path) as yaml_file:
            # load all documents into a generator
            docs = yaml.load_all(yaml_file, Loader=yaml.FullLoader)
            data = []
            for doc in docs:
                if enums and isinstance(doc, dict):
                    doc = parse_enum(doc)
                data.append(doc)
    except yaml.YAMLError as e:
        raise libsyn.ConfigError("could not parse {}: {}".format(path, e))
    return data


def load_doc(path, enums=None):
    """Load the first document of a file as a dictionary."""
    docs = [d for d in load_yaml(path, enums) if d is not None]
    if not docs or not isinstance(docs[0], dict):
        raise libsyn.ConfigError("{} does not hold a mapping".format(path))
    return docs[0]
