# ParaView batch pipeline (trace-style). Opaque payload: the catalog
# tooling copies this file into run bundles without interpreting it.
from paraview.simple import *

reader = OpenDataFile("sample.vti")
view = CreateRenderView()
display = Show(reader, view)
ColorBy(display, ("POINTS", "field"))
Render()
SaveScreenshot("frame.png", view)
