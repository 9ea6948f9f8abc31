import sys
from pathlib import Path


def setup_environment():
    """Thêm thư mục gốc của dự án vào PYTHONPATH khi chạy trực tiếp từ mã nguồn"""
    project_root = Path(__file__).resolve().parent
    if str(project_root) not in sys.path:
        sys.path.insert(0, str(project_root))


if __name__ == "__main__":
    setup_environment()

    from app.main import main

    sys.exit(main())
