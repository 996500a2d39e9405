# Lets pytest collect the Django test suite, configured as manage.py does.

import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "benchsite.settings")
django.setup()
