"""HTTP annotation service (FastAPI app factory in app.py)."""
