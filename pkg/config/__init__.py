"""
FeketeLab config module.
Django project shell: settings, logging and the management-command surface.
"""
