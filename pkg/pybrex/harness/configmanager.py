import configparser
import logging
import os

from pybrex.exceptions import ConfigError


class ConfigManager:
    """
    Sectioned key=value experiment configuration.

    One instance per file: several experiment configs can be open in the same process.
    Relative paths stored in the file resolve against the file's directory (see resolve_path).
    """

    def __init__(self, config_path='config.ini', sections=None):
        self.config = configparser.ConfigParser()
        self.config_path = config_path
        self.logger = logging.getLogger(self.__class__.__name__)
        if sections is None:
            self.load_config()
        else:
            self.config.read_dict({s: {k: str(v) for k, v in opts.items()} for s, opts in sections.items()})

    def load_config(self):
        if not os.path.exists(self.config_path):
            self.logger.warning(f"Configuration file '{self.config_path}' not found. Using default settings.")
            return
        try:
            self.config.read(self.config_path, encoding='utf-8')
        except configparser.Error as e:
            raise ConfigError(f"cannot parse '{self.config_path}': {e}") from e

    def save_config(self, path=None):
        path = path or self.config_path
        try:
            with open(path, 'w', encoding='utf-8') as configfile:
                self.config.write(configfile)
        except OSError as e:
            self.logger.error(f"Error saving configuration: {e}")
            raise

    def get(self, section, option, fallback=None):
        try:
            return self.config.get(section, option)
        except (configparser.NoSectionError, configparser.NoOptionError):
            return fallback

    def has(self, section, option):
        return self.config.has_option(section, option)

    def require(self, section, option):
        value = self.get(section, option)
        if value is None or value.strip() == '':
            raise ConfigError(f"missing required key [{section}] {option} in '{self.config_path}'")
        return value

    def _typed(self, section, option, fallback, convert, type_name):
        value = self.get(section, option)
        if value is None or value.strip() == '':
            return fallback
        try:
            return convert(value.strip())
        except ValueError as e:
            raise ConfigError(f"[{section}] {option} = {value!r} is not a valid {type_name}") from e

    def get_float(self, section, option, fallback=None):
        return self._typed(section, option, fallback, float, "number")

    def get_int(self, section, option, fallback=None):
        return self._typed(section, option, fallback, int, "integer")

    def get_bool(self, section, option, fallback=None):
        def convert(v):
            lowered = v.lower()
            if lowered in self.config.BOOLEAN_STATES:
                return self.config.BOOLEAN_STATES[lowered]
            raise ValueError(v)
        return self._typed(section, option, fallback, convert, "boolean")

    def get_list(self, section, option, fallback=None, item_type=float):
        def convert(v):
            return [item_type(item.strip()) for item in v.split(',') if item.strip()]
        return self._typed(section, option, fallback, convert, f"list of {item_type.__name__}")

    def get_choice(self, section, option, choices, fallback=None):
        value = self.get(section, option, fallback)
        if value is not None and value not in choices:
            raise ConfigError(f"[{section}] {option} must be one of {sorted(choices)}, got {value!r}")
        return value

    def resolve_path(self, section, option, fallback=None):
        value = self.get(section, option, fallback)
        if value is None or os.path.isabs(value):
            return value
        return os.path.join(os.path.dirname(os.path.abspath(self.config_path)), value)

    def set(self, section, option, value):
        if not self.config.has_section(section):
            self.config.add_section(section)
        self.config.set(section, option, str(value))

    def delete(self, section, option=None):
        if option:
            if self.config.has_section(section) and self.config.has_option(section, option):
                self.config.remove_option(section, option)
            else:
                self.logger.warning(f"Section '{section}' or option '{option}' not found.")
        else:
            if self.config.has_section(section):
                self.config.remove_section(section)
            else:
                self.logger.warning(f"Section '{section}' not found.")

    def reset(self):
        self.config = configparser.ConfigParser()
        self.save_config()
