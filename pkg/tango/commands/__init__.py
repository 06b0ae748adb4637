from tango.commands import barbell, dataset, evaluate, landscape, train, verify

COMMANDS = (dataset, train, evaluate, barbell, landscape, verify)
