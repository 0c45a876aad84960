from mvrank.cli import main

raise SystemExit(main())
