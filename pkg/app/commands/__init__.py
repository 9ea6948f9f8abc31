# Các lệnh con của dòng lệnh; mỗi module có register() và run()
from app.commands import calibrate, curves, evaluate, tag, train

COMMANDS = (train, tag, calibrate, evaluate, curves)
