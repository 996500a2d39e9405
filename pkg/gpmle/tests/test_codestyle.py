# -*- mode: python; coding: utf-8 -*-

import contextlib
import io
import os

import pycodestyle

from django import test
from django.conf import settings
from django.test import tag

PACKAGES = ('gpmle', 'benchsite')


class CodeStyleTests(test.SimpleTestCase):

    def source_files(self):
        '''Every Python file of our packages, plus manage.py and setup.py'''
        yield os.path.join(settings.BASE_DIR, 'manage.py')
        yield os.path.join(settings.BASE_DIR, 'setup.py')

        for package in PACKAGES:
            top = os.path.join(settings.BASE_DIR, package)

            for dirpath, dirs, fns in os.walk(top):
                dirs[:] = sorted(dn for dn in dirs if dn != '__pycache__')

                yield from (os.path.join(dirpath, fn)
                            for fn in sorted(fns)
                            if fn.endswith('.py') and not fn.startswith('.'))

    @tag('pep8')
    def test_pep8(self):
        style = pycodestyle.StyleGuide()
        buf = io.StringIO()

        with contextlib.redirect_stdout(buf):
            report = style.check_files(list(self.source_files()))

        self.assertEqual(report.total_errors, 0,
                         'code style errors and/or warnings:\n\n' +
                         buf.getvalue())

    def test_source_files(self):
        sources = list(self.source_files())

        self.assertIn('test_codestyle.py', map(os.path.basename, sources))
        self.assertTrue(all(os.path.isfile(fn) for fn in sources),
                        sources)
