import csv from "csv-kit"
export default csv
