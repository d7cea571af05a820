from dotenv import find_dotenv, load_dotenv

load_dotenv(find_dotenv(usecwd=True))

__version__ = "0.1.0"
