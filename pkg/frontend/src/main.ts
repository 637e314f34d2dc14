// Script entry loaded by the server page shells and /ui/index.html.
import { boot } from "./app.js";

void boot(document);
