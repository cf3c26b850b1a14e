from unbalanced.cli import main

raise SystemExit(main())
