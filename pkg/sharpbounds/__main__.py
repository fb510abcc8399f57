from sharpbounds_cli.__main__ import execute_sharpbounds

execute_sharpbounds()
