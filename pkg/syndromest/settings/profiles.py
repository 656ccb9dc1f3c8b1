# Profile settings
"""Profile settings to setup common configurations.

Each profile has a default set of settings, which can be modified through
"modifier" sub-profiles with groups of settings that overwrite the
given default settings. Modifiers are named presets or YAML/JSON files.
"""
import os

from syndromest.io import libsyn, yaml_io
from syndromest.settings import config


#: dict: Dictionary mapping the names of Enums used in profiles to their Enum
# classes for parsing Enums given as strings.
_PROFILE_ENUMS = {
    "Estimators": config.Estimators,
    "InitModes": config.InitModes,
    "DirichletConventions": config.DirichletConventions,
    "PseudocountForms": config.PseudocountForms,
    "FisherModes": config.FisherModes,
    "CodeNames": config.CodeNames,
}


class SettingsDict(dict):
    """Profile dictionary, which contains collections of settings and allows
    modification by applying additional groups of settings specified in
    this dictionary.

    Attributes:
        PATH_PROFILES (str): Path to profiles directory.
        NAME_KEY (str): Key for profile name.
        profiles (dict): Dictionary of profiles to modify the default
            values, where each key is the profile name and the value
            is a nested dictionary that will overwrite or update the
            current values.
        delimiter (str): Profile names delimiter; defaults to ``,``.

    """
    PATH_PROFILES = "profiles"
    _EXT_FILES = (".yml", ".yaml", ".json")
    NAME_KEY = "settings_name"

    def __init__(self, *args, **kwargs):
        super().__init__(self)
        self[self.NAME_KEY] = "default"
        self.profiles = {}
        self.delimiter = ","

    def add_modifier(self, mod_name, profiles, sep):
        """Add a modifier dictionary, overwriting any existing settings
        with values from this dictionary.

        The modifier may either match an existing profile in ``profiles``
        or specify a path to a YAML or JSON file. Files are first checked in
        :const:`PATH_PROFILES`, followed by ``mod_name`` as the full path.

        Args:
            mod_name (str): Name of the modifier, which will be appended to
                the name of the current settings.
            profiles (dict): Profiles dictionary, where each key is a profile
                name and value is a profile as a dictionary.
            sep (str): Separator between modifier elements.

        Raises:
            :class:`libsyn.ConfigError`: if the profile or file is not found,
            or a file sets a key absent from the defaults.

        """
        if os.path.splitext(mod_name)[1].lower() in self._EXT_FILES:
            mod_path = os.path.join(self.PATH_PROFILES, mod_name)
            if not os.path.exists(mod_path):
                # fall back to loading directly from given path
                libsyn.printv("{} profile file not found, checking {}"
                              .format(mod_path, mod_name))
                mod_path = mod_name
                if not os.path.exists(mod_path):
                    raise libsyn.ConfigError(
                        "profile file {} not found".format(mod_name))
            mods = {}
            for doc in yaml_io.load_yaml(mod_path, _PROFILE_ENUMS):
                if doc:
                    mods.update(doc)
            print("loaded {}:\n{}".format(mod_path, mods))
        else:
            if mod_name not in profiles:
                raise libsyn.ConfigError(
                    "{} profile not found; choose from {}".format(
                        mod_name, list(profiles.keys())))
            mods = profiles[mod_name]

        self[self.NAME_KEY] += sep + mod_name
        for key in mods.keys():
            if key not in self:
                raise libsyn.ConfigError(
                    "unknown setting {!r} in {}".format(key, mod_name))
            if isinstance(self[key], dict) and isinstance(mods[key], dict):
                # if both current and new setting values are dicts,
                # update rather than replacing the current dict
                self[key].update(mods[key])
            else:
                self[key] = mods[key]

    def update_settings(self, names_str):
        """Update settings by layering profiles in order of appearance.

        Args:
            names_str (str): Profile names or files separated by ",".
        """
        for profile in names_str.split(self.delimiter):
            profile = profile.strip()
            if profile:
                self.add_modifier(profile, self.profiles, self.delimiter)
        libsyn.printv("settings for {}:\n{}".format(self[self.NAME_KEY], self))

