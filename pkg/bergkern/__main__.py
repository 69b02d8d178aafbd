from bergkern.main import app

app(prog_name="bergkern")
