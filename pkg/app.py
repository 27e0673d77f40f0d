#!/usr/bin/env python3

import os

from flask import Flask
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

PORT = int(os.getenv('RISAMP_PORT', '6969'))


def create_app():
    """Create the Flask app with all routes registered"""
    app = Flask(__name__)

    from app_routes import register_routes
    register_routes(app)
    return app


app = create_app()

if __name__ == '__main__':
    print("=" * 60)
    print("🚀 RIS Few-Bit Channel Estimation Service Starting...")
    print("=" * 60)
    print(f"🌐 Server: http://0.0.0.0:{PORT}")
    print("🔍 Run logging: ENABLED")
    print("=" * 60)

    app.run(debug=False, host='0.0.0.0', port=PORT)
