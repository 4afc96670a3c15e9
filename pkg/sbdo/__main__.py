"""
sbdo 主入口

允许使用 `python -m sbdo` 启动
"""

from sbdo.cli import main

if __name__ == "__main__":
    main()
