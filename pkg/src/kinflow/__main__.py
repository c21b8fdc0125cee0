from kinflow.cli import main
import sys

sys.exit(main())
