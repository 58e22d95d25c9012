import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tauberian_lab.settings')
django.setup()
