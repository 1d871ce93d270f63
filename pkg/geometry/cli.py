"""
Process entry point: `defgeo <subcommand> ...` is `manage.py <subcommand> ...`.
"""
import os
import sys

SUBCOMMANDS = ('eval', 'defset', 'fingerprint', 'equiv', 'edcheck', 'canonicalize', 'classify', 'oracle')

USAGE = "usage: defgeo {" + ','.join(SUBCOMMANDS) + "} ...\n"


def cli_main(argv=None):
    """Run one subcommand and return its exit status (0 ok, 1 negative verdict, 2 error)"""
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        sys.stderr.write(USAGE)
        return 2

    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'defgeo.settings')
    import django
    from django.core.management import load_command_class

    django.setup()
    command = load_command_class('geometry', argv[0])
    try:
        command.run_from_argv(['defgeo', *argv])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 2
    return 0


if __name__ == '__main__':
    sys.exit(cli_main())
