import os
import sys
from pathlib import Path

# The Django project lives in backend/ (manage.py sets the same settings module).
BACKEND_DIR = Path(__file__).resolve().parent / 'backend'
if str(BACKEND_DIR) not in sys.path:
    sys.path.insert(0, str(BACKEND_DIR))

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')

import django  # noqa: E402

django.setup()
