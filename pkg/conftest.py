"""Configure Django for plain pytest runs of the Django test cases."""
import os

# The project does not depend on gmpy2; keep mpmath on its pure-Python
# backend even if gmpy2 happens to be installed in the environment.
os.environ.setdefault('MPMATH_NOGMPY', '1')

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
django.setup()
