from django.apps import AppConfig


class GpMleConfig(AppConfig):
    name = 'gpmle'
    verbose_name = 'Gaussian process maximum likelihood benchmark'
    default_auto_field = 'django.db.models.AutoField'
