from sipot.cli import app

app(prog_name="sipot")
