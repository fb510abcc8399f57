import json
from os import path
from tempfile import TemporaryDirectory
from unittest import TestCase

from click.testing import CliRunner

import sharpbounds
from sharpbounds_cli.main import cli

STUDY_ARGS = ("--p-e1", "0.27", "--p-d1-e0", "0.38", "--p-d1-e1", "0.49")


def run_cli(*arguments, **kwargs):
    sharpbounds.is_cli = True
    runner = CliRunner()
    result = runner.invoke(cli, arguments, **kwargs)
    sharpbounds.is_cli = False
    return result


class CliTestCase(TestCase):
    """
    Commands write to files in a temporary directory so stdout parsing never
    sees log lines.
    """

    def setUp(self):
        self._temp_dir = TemporaryDirectory()
        self.temp_dir = self._temp_dir.name

    def tearDown(self):
        self._temp_dir.cleanup()

    def temp_path(self, *names):
        return path.join(self.temp_dir, *names)

    def write_file(self, name, text):
        filename = self.temp_path(name)
        with open(filename, "w", encoding="utf-8") as f:
            f.write(text)
        return filename

    def read_file(self, name):
        with open(self.temp_path(name), encoding="utf-8") as f:
            return f.read()

    def run_to_file(self, *arguments, name="out"):
        result = run_cli(*arguments, "--out", self.temp_path(name))
        assert result.exit_code == 0, result.output
        return self.read_file(name)

    def run_json(self, *arguments):
        return json.loads(self.run_to_file(*arguments, "--format", "json", name="out.json"))
