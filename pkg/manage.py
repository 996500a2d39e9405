#!/usr/bin/env python
'''Django script invocation for the benchmark.

Runs inside a per-platform virtual environment next to this file,
creating it and installing the package (with its test extra) on first
use. Set ``GPMLE_NO_VENV`` to run with the current interpreter.
'''

import os
import platform
import subprocess
import sys

REQUIRED_PYTHON = (3, 9)

BASEDIR = os.path.abspath(os.path.dirname(__file__))

IS_WINDOWS = platform.system() == 'Windows'


def venv_dir():
    # one per platform and interpreter, so several VMs can share a checkout
    name = 'venv-{}-{}-{}.{}'.format(
        platform.system(), platform.python_implementation(),
        *platform.python_version_tuple()[:2])
    return os.path.join(BASEDIR, name.lower())


def venv_python(venvdir):
    bindir = 'Scripts' if IS_WINDOWS else 'bin'
    return os.path.join(venvdir, bindir, os.path.basename(sys.executable))


def running_in_checkout():
    exe = sys.executable

    if os.path.splitdrive(exe)[0] != os.path.splitdrive(BASEDIR)[0]:
        return False

    return os.path.commonpath([exe, BASEDIR]) == BASEDIR


def create_venv(venvdir):
    import venv

    try:
        venv.main(['--upgrade', venvdir])
    except SystemExit:
        # some distributions ship venv without pip; don't leave a
        # half-built environment behind
        import shutil
        shutil.rmtree(venvdir)
        raise


def reexec(python):
    if not IS_WINDOWS:
        os.execlp(python, python, *sys.argv)

    # no exec on Windows
    with subprocess.Popen([python] + sys.argv) as proc:
        try:
            proc.wait()
        except KeyboardInterrupt:
            proc.terminate()

    sys.exit(proc.returncode)


def bootstrap():
    if sys.version_info[:2] < REQUIRED_PYTHON:
        sys.exit('This script requires Python %d.%d or later' %
                 REQUIRED_PYTHON)

    venvdir = venv_dir()
    python = venv_python(venvdir)

    if not os.path.isfile(python):
        create_venv(venvdir)

    subprocess.check_call([python, '-m', 'pip', 'install', '-q', '-e',
                           BASEDIR + '[test]'])
    reexec(python)


if __name__ == "__main__":
    if not running_in_checkout() and not os.getenv('GPMLE_NO_VENV'):
        bootstrap()

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "benchsite.settings")

    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Is the virtual environment in {} "
            "complete?".format(venv_dir())
        ) from exc

    execute_from_command_line(sys.argv)
