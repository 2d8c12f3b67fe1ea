__appname__ = "normpack"
__appversion__ = '1.0.0'
